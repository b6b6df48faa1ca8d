//! The worked-example traces and properties.
//!
//! Signals sampled at different instants share one trace; a record holds
//! only the signals sampled at its timestamp.

use sigdiag_core::trace::{Record, Trace};

type Series<'a> = (&'a str, &'a [(f64, f64)]);

/// Merges per-signal samples into one trace.
pub fn merge(series: &[Series]) -> Trace {
    let mut times: Vec<f64> = series.iter().flat_map(|(_, s)| s.iter().map(|p| p.0)).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let records = times
        .into_iter()
        .map(|t| {
            series.iter().fold(Record::new(t), |r, (name, s)| match s.iter().find(|p| p.0 == t) {
                Some(&(_, v)) => r.with(name, v),
                None => r,
            })
        })
        .collect();
    Trace::new(series.iter().map(|(n, _)| n.to_string()).collect(), records).expect("fixture timestamps increase")
}

fn on_grid(t: &[f64], v: &[f64]) -> Vec<(f64, f64)> {
    t.iter().copied().zip(v.iter().copied()).collect()
}

/// β and ρ of the introductory example.
pub fn fig1() -> Trace {
    let t = [0.0, 0.2, 0.9, 1.8, 3.0, 4.9, 5.7, 6.0];
    let beta = on_grid(&t, &[2.0, 153.5, 55.0, 0.5, 80.0, 203.5, 20.0, 0.5]);
    let rho = on_grid(&t, &[1.0, 52.5, 125.0, 125.5, 25.0, 75.5, 35.0, 200.5]);
    merge(&[("beta", &beta), ("rho", &rho)])
}

pub fn fig4() -> Trace {
    let b = [(1.0, 1.5), (2.0, 2.0), (3.0, 3.0), (4.0, 5.0), (5.0, 2.5), (6.0, 4.3), (7.0, 3.5)];
    merge(&[("beta1", &b)])
}

pub fn fig5() -> Trace {
    let t = [0.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
    let b1 = on_grid(&t, &[2.0, 1.0, 2.0, 0.5, 0.8, 2.5, 2.8]);
    let b2 = on_grid(&t, &[5.0, 4.0, 4.5, 3.5, 3.3, 3.8, 3.5]);
    let b3 = on_grid(&t, &[5.0, 4.8, 4.3, 0.8, 2.0, 1.8, 1.0]);
    merge(&[("beta1", &b1), ("beta2", &b2), ("beta3", &b3)])
}

pub fn fig6() -> Trace {
    let t = [0.0, 0.2, 0.9, 1.8, 3.0, 4.9, 5.7, 6.0];
    let b1 = on_grid(&t, &[2.0, 153.5, 20.0, 0.5, 80.0, 203.5, 20.0, 0.5]);
    let b2 = on_grid(&t, &[100.0; 8]);
    let b3 = on_grid(&t, &[200.0, 180.0, 160.0, 100.0, 90.0, 70.0, 60.0, 55.0]);
    let b4 = on_grid(&t, &[30.0, 35.0, 50.0, 125.0, 150.0, 160.0, 170.0, 190.0]);
    merge(&[("beta1", &b1), ("beta2", &b2), ("beta3", &b3), ("beta4", &b4)])
}

pub fn fig8() -> Trace {
    let b1 = [
        (0.0, 2.0),
        (0.2, 153.5),
        (0.5, 20.0),
        (1.0, 120.0),
        (1.2, 10.0),
        (1.9, 50.0),
        (2.5, 50.0),
        (3.5, 5.0),
        (4.0, 200.0),
        (4.5, 10.0),
        (5.0, 100.0),
        (6.5, 100.0),
    ];
    let b2 = [(1.0, 20.0), (1.5, 150.0), (2.5, 100.0), (6.5, 100.0)];
    let b3 = [(1.0, 165.0), (1.5, 80.0), (2.0, 150.0), (2.5, 70.0), (5.8, 70.0)];
    let b4 = [(0.3, 180.0), (5.8, 180.0)];
    let b5 = [(0.1, 180.0), (5.8, 20.0)];
    let b6 = [(0.2, 40.0), (5.8, 150.0)];
    merge(&[("beta1", &b1), ("beta2", &b2), ("beta3", &b3), ("beta4", &b4), ("beta5", &b5), ("beta6", &b6)])
}

pub fn fig9() -> Trace {
    let b1 = [(0.6, 2.0), (2.0, 2.4), (3.0, 2.0), (4.0, 1.5), (5.0, 0.8), (6.0, 1.5), (6.7, 2.5)];
    let b2 = [(0.5, 4.0), (2.0, 5.0), (3.0, 5.0), (4.0, 4.5), (5.0, 5.4), (6.0, 5.0), (7.0, 6.0)];
    let b3 = [(1.0, 0.5), (2.0, 2.0), (3.0, 0.5), (4.0, 4.0), (5.0, 4.8), (6.0, 3.5), (7.0, 3.2)];
    let b4 = [(0.5, 4.5), (2.0, 3.8), (3.0, 3.1), (4.0, 0.5), (5.0, 1.8), (6.0, 1.0), (7.0, 2.2)];
    merge(&[("beta1", &b1), ("beta2", &b2), ("beta3", &b3), ("beta4", &b4)])
}

pub fn fig10() -> Trace {
    let b1 = [(0.6, 2.0), (2.0, 2.4), (3.0, 2.0), (4.0, 1.5), (5.0, 0.8), (6.0, 1.5), (6.7, 2.5)];
    let b2 = [(0.6, 0.5), (2.0, 4.5), (3.0, 4.9), (4.0, 4.5), (5.0, 4.8), (6.0, 4.1), (6.7, 4.5)];
    let b3 = [(1.0, 0.5), (2.0, 2.0), (3.0, 0.5), (4.0, 3.8), (5.0, 3.5), (6.0, 3.3), (7.0, 3.5)];
    let b4 = [(0.5, 4.0), (2.0, 3.8), (3.0, 2.1), (4.0, 0.5), (5.0, 1.8), (6.0, 1.0), (7.0, 0.9)];
    merge(&[("beta1", &b1), ("beta2", &b2), ("beta3", &b3), ("beta4", &b4)])
}

/// Property of the Fig. 1 example.
pub const PHI1: &str = "globally exists spike in beta with width < 0.5 amplitude < 90";
pub const P1: &str = "after 7 exists spike in beta1 with width < 0.5 amplitude < 90";
pub const P2: &str = "not globally beta3 becomes < 3";
pub const P3: &str = "globally beta3 rises monotonically reaching 3 and between 2 and 6 assert beta3 <= 4";
/// The requirement checked on the attitude-control traces.
pub const PHI29: &str = "between 11 and 50 assert mu < 0.007";
