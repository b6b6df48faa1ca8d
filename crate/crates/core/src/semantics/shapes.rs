//! Shape predicates over sampled values.
//!
//! All positions are sample indices; windows are inclusive index ranges.
//! `Peak` is the written polarity (strict maximum between two minima),
//! `Trough` its mirror image.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Peak,
    Trough,
}

impl Polarity {
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Peak => 1.0,
            Polarity::Trough => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Polarity::Peak => "peak",
            Polarity::Trough => "trough",
        }
    }

    pub const BOTH: [Polarity; 2] = [Polarity::Peak, Polarity::Trough];
}

fn nondecreasing(v: &[f64], a: usize, b: usize) -> bool {
    (a..b).all(|k| v[k] <= v[k + 1])
}

fn nonincreasing(v: &[f64], a: usize, b: usize) -> bool {
    (a..b).all(|k| v[k] >= v[k + 1])
}

fn increasing(v: &[f64], a: usize, b: usize) -> bool {
    (a..b).all(|k| v[k] < v[k + 1])
}

fn decreasing(v: &[f64], a: usize, b: usize) -> bool {
    (a..b).all(|k| v[k] > v[k + 1])
}

/// maxf: `v[t]` is maximal, non-decreasing up to `t`, non-increasing after.
pub fn is_max_nonstrict(v: &[f64], t: usize, a: usize, b: usize) -> bool {
    a <= t && t <= b && nondecreasing(v, a, t) && nonincreasing(v, t, b)
}

/// lmaxf: strictly increasing up to `t`, strictly decreasing after.
pub fn is_max_strict(v: &[f64], t: usize, a: usize, b: usize) -> bool {
    a <= t && t <= b && increasing(v, a, t) && decreasing(v, t, b)
}

pub fn is_min_nonstrict(v: &[f64], t: usize, a: usize, b: usize) -> bool {
    a <= t && t <= b && nonincreasing(v, a, t) && nondecreasing(v, t, b)
}

pub fn is_min_strict(v: &[f64], t: usize, a: usize, b: usize) -> bool {
    a <= t && t <= b && decreasing(v, a, t) && increasing(v, t, b)
}

/// ext: strict local extremum with a neighbour on each side.
pub fn is_extremum(v: &[f64], t: usize, a: usize, b: usize) -> bool {
    a < t && t < b && (is_max_strict(v, t, a, b) || is_min_strict(v, t, a, b))
}

/// mon: strictly increasing over every sample pair of `[a, b]`.
pub fn is_monotone_increasing(v: &[f64], a: usize, b: usize) -> bool {
    increasing(v, a, b)
}

pub fn is_monotone_decreasing(v: &[f64], a: usize, b: usize) -> bool {
    decreasing(v, a, b)
}

pub fn amplitude(v: &[f64], t1: usize, t2: usize, t3: usize) -> f64 {
    (v[t2] - v[t1]).abs().max((v[t2] - v[t3]).abs())
}

pub fn width(t1: f64, t2: f64) -> f64 {
    (t2 - t1).abs()
}

pub fn peak_to_peak(v: &[f64], t1: usize, t2: usize) -> f64 {
    (v[t1] - v[t2]).abs()
}

pub fn amp_distance(amp: f64, target: f64) -> f64 {
    (amp - target).abs()
}

pub fn p2p_distance(p2p: f64, target: f64) -> f64 {
    (p2p - target).abs()
}

pub fn width_distance(w: f64, target: f64) -> f64 {
    (w - target).abs()
}

/// spk for `Peak`: minf(t2,[t1,t3]) ∧ lmaxf(t3,[t2,t4]) ∧ minf(t4,[t3,t5]).
/// The outer bounds may coincide with t2/t4 (callers restrict this to
/// window edges).
pub fn spike_shape(v: &[f64], t: [usize; 5], polarity: Polarity) -> bool {
    let [t1, t2, t3, t4, t5] = t;
    if !(t1 <= t2 && t2 < t3 && t3 < t4 && t4 <= t5) {
        return false;
    }
    match polarity {
        Polarity::Peak => {
            is_min_nonstrict(v, t2, t1, t3) && is_max_strict(v, t3, t2, t4) && is_min_nonstrict(v, t4, t3, t5)
        }
        Polarity::Trough => {
            is_max_nonstrict(v, t2, t1, t3) && is_min_strict(v, t3, t2, t4) && is_max_nonstrict(v, t4, t3, t5)
        }
    }
}

/// osc for `Peak`: lminf(t2,[t1,t3]) ∧ lmaxf(t3,[t2,t4]) ∧ lminf(t4,[t3,t5]).
pub fn oscillation_shape(v: &[f64], t: [usize; 5], polarity: Polarity) -> bool {
    let [t1, t2, t3, t4, t5] = t;
    if !(t1 < t2 && t2 < t3 && t3 < t4 && t4 < t5) {
        return false;
    }
    match polarity {
        Polarity::Peak => is_min_strict(v, t2, t1, t3) && is_max_strict(v, t3, t2, t4) && is_min_strict(v, t4, t3, t5),
        Polarity::Trough => {
            is_max_strict(v, t2, t1, t3) && is_min_strict(v, t3, t2, t4) && is_max_strict(v, t4, t3, t5)
        }
    }
}

/// One spike or oscillation occurrence. `idx` holds t1..t5 with the
/// narrowest outer window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeInstance {
    pub polarity: Polarity,
    pub idx: [usize; 5],
}

impl ShapeInstance {
    /// t4 − t2 (spike width, oscillation period).
    pub fn span(&self, t: &[f64]) -> f64 {
        width(t[self.idx[1]], t[self.idx[3]])
    }

    pub fn amplitude(&self, v: &[f64]) -> f64 {
        amplitude(v, self.idx[1], self.idx[2], self.idx[3])
    }

    pub fn p2p(&self, v: &[f64]) -> (f64, f64) {
        (peak_to_peak(v, self.idx[1], self.idx[2]), peak_to_peak(v, self.idx[2], self.idx[3]))
    }
}

/// The middle sample of a strict run pair: returns (t2, t4) for a strict
/// extremum at `t3` of the given polarity inside `[a, b]`.
fn runs_around(v: &[f64], t3: usize, a: usize, b: usize, sign: f64) -> Option<(usize, usize)> {
    let s = |k: usize| sign * v[k];
    if t3 <= a || t3 >= b || !(s(t3 - 1) < s(t3) && s(t3 + 1) < s(t3)) {
        return None;
    }
    let mut t2 = t3 - 1;
    while t2 > a && s(t2 - 1) < s(t2) {
        t2 -= 1;
    }
    let mut t4 = t3 + 1;
    while t4 < b && s(t4 + 1) < s(t4) {
        t4 += 1;
    }
    Some((t2, t4))
}

/// Every spike occurrence inside `[a, b]`, both polarities, ordered by t3.
///
/// A non-strict outer extremum needs a sample on its outer side unless it
/// sits on the window edge.
pub fn spike_instances(v: &[f64], a: usize, b: usize) -> Vec<ShapeInstance> {
    let mut out = Vec::new();
    for t3 in a + 1..b.max(a + 1) {
        for polarity in Polarity::BOTH {
            if let Some((t2, t4)) = runs_around(v, t3, a, b, polarity.sign()) {
                let t1 = if t2 == a { a } else { t2 - 1 };
                let t5 = if t4 == b { b } else { t4 + 1 };
                out.push(ShapeInstance { polarity, idx: [t1, t2, t3, t4, t5] });
            }
        }
    }
    out
}

/// Every oscillation occurrence inside `[a, b]`, both polarities.
pub fn oscillation_instances(v: &[f64], a: usize, b: usize) -> Vec<ShapeInstance> {
    let mut out = Vec::new();
    for t3 in a + 1..b.max(a + 1) {
        for polarity in Polarity::BOTH {
            let sign = polarity.sign();
            if let Some((t2, t4)) = runs_around(v, t3, a, b, sign) {
                let s = |k: usize| sign * v[k];
                if t2 > a && s(t2 - 1) > s(t2) && t4 < b && s(t4 + 1) > s(t4) {
                    out.push(ShapeInstance { polarity, idx: [t2 - 1, t2, t3, t4, t4 + 1] });
                }
            }
        }
    }
    out
}

/// Indices of strict local extrema inside `[a, b]`.
pub fn extrema(v: &[f64], a: usize, b: usize) -> Vec<usize> {
    (a + 1..b.max(a + 1))
        .filter(|&k| (v[k - 1] < v[k] && v[k + 1] < v[k]) || (v[k - 1] > v[k] && v[k + 1] > v[k]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const T: [f64; 8] = [0.0, 0.2, 0.9, 1.8, 3.0, 4.9, 5.7, 6.0];
    const BETA1: [f64; 8] = [2.0, 153.5, 20.0, 0.5, 80.0, 203.5, 20.0, 0.5];

    #[test]
    fn constant_has_no_strict_max() {
        let v = [100.0; 5];
        for t in 1..4 {
            assert!(!is_max_strict(&v, t, t - 1, t + 1));
            assert!(is_max_nonstrict(&v, t, t - 1, t + 1));
        }
    }

    #[test]
    fn amplitude_and_width() {
        assert_eq!(amplitude(&BETA1, 0, 1, 3), 153.0);
        assert_eq!(width(0.0, 1.8), 1.8);
    }

    #[test]
    fn spikes_of_fig6_beta1() {
        let inst = spike_instances(&BETA1, 0, 7);
        let mids: Vec<(Polarity, [usize; 5])> = inst.iter().map(|i| (i.polarity, i.idx)).collect();
        assert_eq!(
            mids,
            vec![
                (Polarity::Peak, [0, 0, 1, 3, 4]),
                (Polarity::Trough, [0, 1, 3, 5, 6]),
                (Polarity::Peak, [2, 3, 5, 7, 7]),
            ]
        );
        for i in &inst {
            assert!(spike_shape(&BETA1, i.idx, i.polarity));
        }
        assert_eq!(inst[0].amplitude(&BETA1), 153.0);
        assert_eq!(inst[0].span(&T), 1.8);
        assert_eq!(inst[2].amplitude(&BETA1), 203.0);
    }

    #[test]
    fn oscillation_needs_strict_outer_extrema() {
        // the boundary relaxation of spikes does not apply
        assert_eq!(oscillation_instances(&BETA1, 0, 7).len(), 1);
        let v = [0.0, 5.0, 1.0, 6.0, 2.0];
        let inst = oscillation_instances(&v, 0, 4);
        assert_eq!(inst.len(), 1);
        assert_eq!(inst[0].polarity, Polarity::Trough);
        assert!(oscillation_shape(&v, inst[0].idx, Polarity::Trough));
        assert_eq!(extrema(&v, 0, 4), vec![1, 2, 3]);
    }

    #[test]
    fn monotone() {
        assert!(is_monotone_increasing(&[1.0, 2.0, 3.0], 0, 2));
        assert!(!is_monotone_increasing(&[1.0, 2.0, 2.0], 0, 2));
        assert!(is_monotone_increasing(&[1.0], 0, 0));
    }
}
