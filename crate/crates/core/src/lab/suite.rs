//! Randomized sweeps over the scalar checks, producing [`CheckReport`]s.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampler::{stream, uniform};
use super::scalar::{
    check_cosh_difference, check_exp_cosh_sandwich, check_product_identity, check_product_sech,
    check_triangle, cosh_deficit_margin,
};

/// Violation threshold on margins relative to the dominant side.
pub const CHECK_TOL: f64 = 1e-12;

const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub samples: u64,
    pub violations: u64,
    /// Smallest relative margin seen (negative for identities: minus the
    /// largest residual).
    pub worst_margin: f64,
    pub worst_input: Vec<f64>,
    pub seed: u64,
    pub tol: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

struct Partial {
    samples: u64,
    violations: u64,
    worst_margin: f64,
    worst_input: Vec<f64>,
}

/// Runs `samples` evaluations of `eval` in chunks; chunk `i` draws from
/// stream `(seed, stream_base + i)`. `eval` returns the relative margin
/// and the sample that produced it; `violated` decides whether a margin
/// counts as a violation.
fn run_suite<F, V>(
    name: &str,
    samples: u64,
    seed: u64,
    stream_base: u64,
    eval: F,
    violated: V,
) -> CheckReport
where
    F: Fn(&mut ChaCha8Rng) -> (f64, Vec<f64>) + Sync,
    V: Fn(f64) -> bool + Sync,
{
    let chunks = (samples as usize).div_ceil(CHUNK);
    let partials: Vec<Partial> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let count = CHUNK.min(samples as usize - chunk * CHUNK);
            let mut rng = stream(seed, stream_base + chunk as u64);
            let mut part = Partial {
                samples: 0,
                violations: 0,
                worst_margin: f64::INFINITY,
                worst_input: Vec::new(),
            };
            for _ in 0..count {
                let (margin, input) = eval(&mut rng);
                part.samples += 1;
                if violated(margin) || margin.is_nan() {
                    part.violations += 1;
                }
                if margin < part.worst_margin || (margin.is_nan() && !part.worst_margin.is_nan()) {
                    part.worst_margin = margin;
                    part.worst_input = input;
                }
            }
            part
        })
        .collect();

    let mut report = CheckReport {
        check_name: name.to_string(),
        samples: 0,
        violations: 0,
        worst_margin: f64::INFINITY,
        worst_input: Vec::new(),
        seed,
        tol: CHECK_TOL,
    };
    for part in partials {
        report.samples += part.samples;
        report.violations += part.violations;
        if part.worst_margin < report.worst_margin {
            report.worst_margin = part.worst_margin;
            report.worst_input = part.worst_input;
        }
    }
    report
}

fn inequality(m: f64) -> bool {
    m < -CHECK_TOL
}

/// `(a, b)` uniform on `[-50, 50]²`.
pub fn cosh_difference_suite(samples: u64, seed: u64) -> CheckReport {
    run_suite(
        "cosh_difference",
        samples,
        seed,
        1 << 32,
        |rng| {
            let (a, b) = (uniform(rng, -50.0, 50.0), uniform(rng, -50.0, 50.0));
            (check_cosh_difference(a, b).relative(), vec![a, b])
        },
        inequality,
    )
}

/// Five factors uniform on `[0, 10]`; margin is minus the relative residual.
pub fn product_identity_suite(samples: u64, seed: u64) -> CheckReport {
    run_suite(
        "product_identity",
        samples,
        seed,
        2 << 32,
        |rng| {
            let r: Vec<f64> = (0..5).map(|_| uniform(rng, 0.0, 10.0)).collect();
            let res = check_product_identity(&r).unwrap_or(f64::NAN);
            (-res, r)
        },
        |m| -m > CHECK_TOL,
    )
}

/// Exhaustive lattice `r_j ∈ {0, 0.5, …, 5}` for `p = 1..=max_p`.
pub fn product_identity_lattice(max_p: usize) -> CheckReport {
    let mut report = CheckReport {
        check_name: "product_identity_lattice".into(),
        samples: 0,
        violations: 0,
        worst_margin: f64::INFINITY,
        worst_input: Vec::new(),
        seed: 0,
        tol: CHECK_TOL,
    };
    for p in 1..=max_p {
        let total = 11usize.pow(p as u32);
        for lin in 0..total {
            let mut rest = lin;
            let r: Vec<f64> = (0..p)
                .map(|_| {
                    let v = (rest % 11) as f64 * 0.5;
                    rest /= 11;
                    v
                })
                .collect();
            let res = check_product_identity(&r).unwrap_or(f64::NAN);
            report.samples += 1;
            if !(res <= CHECK_TOL) {
                report.violations += 1;
            }
            if -res < report.worst_margin {
                report.worst_margin = -res;
                report.worst_input = r;
            }
        }
    }
    report
}

/// Draws `p ∈ {3, 5}`, `n ∈ {1, 2, 3}` and `p` frequency vectors with
/// Gaussian directions and magnitudes log-uniform on `[10⁻³, 50]`.
fn frequency_tuple(rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let p = if rng.random::<bool>() { 3 } else { 5 };
    let n = rng.random_range(1..=3usize);
    (0..p)
        .map(|_| {
            let dir: Vec<f64> = (0..n)
                .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                .collect();
            let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
            let mag = 10f64.powf(uniform(rng, -3.0, 50f64.log10()));
            dir.iter().map(|x| x / len * mag).collect()
        })
        .collect()
}

fn flatten(xi: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![xi.len() as f64, xi[0].len() as f64];
    out.extend(xi.iter().flatten());
    out
}

pub fn product_sech_suite(samples: u64, seed: u64) -> CheckReport {
    run_suite(
        "product_sech",
        samples,
        seed,
        3 << 32,
        |rng| {
            let xi = frequency_tuple(rng);
            let (m, _) = check_product_sech(&xi).expect("p >= 2");
            (m.relative(), flatten(&xi))
        },
        inequality,
    )
}

/// Same tuples as [`product_sech_suite`], corollary constant `p² 2^p`.
pub fn product_sech_corollary_suite(samples: u64, seed: u64) -> CheckReport {
    run_suite(
        "product_sech_corollary",
        samples,
        seed,
        3 << 32,
        |rng| {
            let xi = frequency_tuple(rng);
            let (_, c) = check_product_sech(&xi).expect("p >= 2");
            (c.relative(), flatten(&xi))
        },
        inequality,
    )
}

/// Same tuples again, checking `|Σξ_j| ≤ Σ|ξ_j|`.
pub fn triangle_suite(samples: u64, seed: u64) -> CheckReport {
    run_suite(
        "triangle_inequality",
        samples,
        seed,
        3 << 32,
        |rng| {
            let xi = frequency_tuple(rng);
            (check_triangle(&xi).relative(), flatten(&xi))
        },
        inequality,
    )
}

/// `r` uniform on `[0, 700]`; the reported margin is the worse of the two sides.
pub fn exp_cosh_sandwich_suite(samples: u64, seed: u64) -> CheckReport {
    run_suite(
        "exp_cosh_sandwich",
        samples,
        seed,
        4 << 32,
        |rng| {
            let r = uniform(rng, 0.0, 700.0);
            let (lo, hi) = check_exp_cosh_sandwich(r).expect("r >= 0");
            (lo.relative().min(hi.relative()), vec![r])
        },
        inequality,
    )
}

/// `r` uniform on `[0, 50]`; `α` is 0 or 1 with probability 1/10 each and
/// uniform on `[0, 1]` otherwise, so both endpoint inequalities are hit.
pub fn cosh_deficit_suite(samples: u64, seed: u64) -> CheckReport {
    run_suite(
        "cosh_deficit_bound",
        samples,
        seed,
        5 << 32,
        |rng| {
            let r = uniform(rng, 0.0, 50.0);
            let u: f64 = rng.random();
            let alpha = if u < 0.1 {
                0.0
            } else if u < 0.2 {
                1.0
            } else {
                rng.random::<f64>()
            };
            (cosh_deficit_margin(r, alpha).relative(), vec![r, alpha])
        },
        inequality,
    )
}

/// All scalar suites at `samples` draws each, plus the exhaustive lattice.
pub fn verify_lemmas(samples: u64, seed: u64) -> Vec<CheckReport> {
    vec![
        cosh_difference_suite(samples, seed),
        product_identity_suite(samples, seed),
        product_identity_lattice(4),
        product_sech_suite(samples, seed),
        product_sech_corollary_suite(samples, seed),
        exp_cosh_sandwich_suite(samples, seed),
        cosh_deficit_suite(samples, seed),
        triangle_suite(samples, seed),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_are_deterministic_and_clean() {
        let a = verify_lemmas(20_000, 11);
        let b = verify_lemmas(20_000, 11);
        assert_eq!(a, b);
        for r in &a {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn lattice_is_exhaustive() {
        let r = product_identity_lattice(4);
        assert_eq!(r.samples, 11 + 121 + 1331 + 14641);
        assert!(r.passed());
        assert!(-r.worst_margin < 1e-12);
    }

    #[test]
    fn a_wrong_inequality_is_caught() {
        // flipping the sandwich must produce violations
        let r = run_suite(
            "flipped",
            1000,
            1,
            0,
            |rng| {
                let r = uniform(rng, 0.1, 10.0);
                let (_, hi) = check_exp_cosh_sandwich(r).unwrap();
                (-hi.relative(), vec![r])
            },
            inequality,
        );
        assert_eq!(r.violations, 1000);
    }
}
