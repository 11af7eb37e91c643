//! Shared fixtures for the criterion benches.

use hyperzero::FunctionSpec;

/// Name, function and interval of each benchmarked problem.
pub fn problems() -> Vec<(&'static str, FunctionSpec, (f64, f64))> {
    vec![
        ("bessel_j10", FunctionSpec::f01_negated(11.0), (0.0, 400.0)),
        ("laguerre_50", FunctionSpec::f11(-50.0, 1.0), (0.0, 250.0)),
        ("jacobi_50", FunctionSpec::f21(-50.0, 54.0, 2.5), (0.0, 1.0)),
        ("hermite_20", FunctionSpec::f20(-10.0, -9.5), (f64::NEG_INFINITY, 0.0)),
    ]
}
