#![allow(dead_code)]

use std::sync::OnceLock;

use cholqr::harness::{run_factorization, Factors, RunConfig};
use cholqr::testbed::{Generator, StabilityReport};
use cholqr::{Algorithm, Backend, Matrix};

pub const U: f64 = f64::EPSILON / 2.0;

/// The 3000×300 suite shares one pair of random orthonormal factors.
pub fn tall_suite() -> &'static Generator {
    static GEN: OnceLock<Generator> = OnceLock::new();
    GEN.get_or_init(|| Generator::new(3000, 300, 1).expect("valid dimensions"))
}

pub fn tall(kappa: f64) -> Matrix {
    tall_suite().build(kappa).expect("valid kappa").matrix
}

pub fn config(algorithm: Algorithm, ranks: usize, panels: Option<usize>) -> RunConfig {
    let cfg = RunConfig::new(algorithm, ranks);
    match panels {
        Some(k) => cfg.panels(k),
        None => cfg,
    }
}

pub fn report(a: &Matrix, cfg: &RunConfig) -> StabilityReport {
    StabilityReport::evaluate(a, &run_factorization(a, cfg)).expect("metrics")
}

pub fn factors(a: &Matrix, cfg: &RunConfig) -> Factors {
    run_factorization(a, cfg).factors.expect("factorization succeeds")
}

pub fn same_factors(x: &Factors, y: &Factors) -> bool {
    x.q.bit_eq(&y.q) && x.r.bit_eq(&y.r)
}

pub const BACKENDS: [Backend; 2] = [Backend::Serial, Backend::Parallel];
