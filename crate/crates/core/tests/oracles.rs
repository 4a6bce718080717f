//! Secular-equation solvers against independent finite-difference oracles.

mod common;

use common::{ball_fd_spectrum, model_fd};
use robin_core::model1d::{tminus_eigenvalues, tplus_eigenvalues, Model1DParams};
use robin_core::radial::{ball_negative_spectrum, shell_negative_spectrum};

const FD_CELLS: usize = 2000;

/// Shifts separating consecutive exact eigenvalues, plus zero.
fn separating_shifts(eigs: &[f64]) -> Vec<f64> {
    let mut s: Vec<f64> = eigs.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    s.push(0.0);
    s
}

fn model_cases() -> Vec<(Model1DParams, Option<f64>)> {
    let mut out = Vec::new();
    for &(delta, m, alpha) in &[(1.0, 0.0, 10.0), (1.0, 1.0, 10.0), (0.5, 0.0, 3.0), (2.0, 0.5, 5.0), (1.0, 0.0, 0.5)] {
        out.push((Model1DParams::new(delta, m, 0.0, alpha), None));
        for beta in [0.0, 2.0, 7.5] {
            out.push((Model1DParams::new(delta, m, beta, alpha), Some(beta)));
        }
    }
    out
}

#[test]
fn model_operators_match_finite_differences() {
    for (p, beta) in model_cases() {
        let exact = match beta {
            None => tplus_eigenvalues(&p, 4).unwrap(),
            Some(_) => tminus_eigenvalues(&p, 4).unwrap(),
        };
        let fd = model_fd(p.delta, p.gamma(), beta, FD_CELLS);
        let approx = fd.lowest(exact.eigenvalues.len());
        for (e, a) in exact.eigenvalues.iter().zip(&approx) {
            assert!((e - a).abs() <= 1e-4 * e.abs().max(1.0), "{p:?}: secular {e} vs fd {a}");
        }
    }
}

#[test]
fn secular_root_count_equals_fd_count() {
    for (p, beta) in model_cases() {
        let exact = match beta {
            None => tplus_eigenvalues(&p, 4).unwrap(),
            Some(_) => tminus_eigenvalues(&p, 4).unwrap(),
        };
        let fd = model_fd(p.delta, p.gamma(), beta, FD_CELLS);
        assert_eq!(fd.count_below(0.0), exact.negative_count(), "{p:?}");
        for s in separating_shifts(&exact.eigenvalues) {
            let secular = exact.eigenvalues.iter().filter(|&&e| e < s).count();
            assert_eq!(fd.count_below(s), secular, "{p:?} below {s}");
        }
    }
}

#[test]
fn tminus_with_neumann_end_matches_oracle() {
    let p = Model1DParams::new(1.0, 0.0, 0.0, 10.0);
    let e = tminus_eigenvalues(&p, 1).unwrap().eigenvalues[0];
    let fd = model_fd(1.0, 10.0, Some(0.0), 4000).eigenvalue(0);
    assert!((e + 100.0).abs() < 1e-3);
    assert!((e - fd).abs() < 1e-4 * 100.0);
}

#[test]
fn ball_spectrum_matches_radial_fd() {
    for dim in [2, 3] {
        for radius in [1.0, 2.0] {
            for alpha in [5.0, 10.0, 20.0] {
                let exact = ball_negative_spectrum(dim, radius, alpha, 5).unwrap().energies();
                let fd = ball_fd_spectrum(dim, radius, alpha, exact.len(), 4000);
                for (e, f) in exact.iter().zip(&fd) {
                    assert!(
                        (e - f).abs() <= 1e-6 * e.abs() + 1e-8,
                        "dim {dim} R {radius} alpha {alpha}: exact {e} fd {f}"
                    );
                }
            }
        }
    }
}

#[test]
fn shell_ground_state_matches_radial_fd() {
    // l = 0 on (a, b): inner normal points towards the origin
    for &(a, b, alpha) in &[(1.0, 2.0, 10.0), (1.0, 2f64.powf(1.0 / 3.0), 10.0), (0.5, 1.0, 4.0)] {
        let exact = shell_negative_spectrum(3, a, b, alpha, 1).unwrap().energies()[0];
        let fd = |cells: usize| {
            common::discretise(&common::FormSpec {
                length: b - a,
                cells,
                weight_power: 2.0,
                inverse_square: 0.0,
                robin_left: alpha,
                robin_right: alpha,
                dirichlet_left: false,
                dirichlet_right: false,
                offset: a,
            })
            .eigenvalue(0)
        };
        let rich = (4.0 * fd(4000) - fd(2000)) / 3.0;
        assert!((exact - rich).abs() <= 1e-6 * exact.abs(), "shell ({a},{b}) alpha {alpha}: {exact} vs {rich}");
    }
}
