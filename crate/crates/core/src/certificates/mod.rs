//! The divergence experiments and their reports.

mod degenerate;
mod exponents;
mod halfspace;
mod identity;
mod main_cert;
mod perron;
mod report;
mod s_l1;
mod tangency;

pub use degenerate::{degenerate_certificate, DegenerateOptions};
pub use exponents::{Exponent, ExponentTriple};
pub use halfspace::{halfspace_type_certificate, strip_parallelogram};
pub use identity::{default_triples, identity_certificate};
pub use main_cert::{main_certificate, MainOptions, LOG_27_16};
pub use perron::perron_certificate;
pub use report::{fit_line, loglog_slope, CertificateReport, LineFit, Verdict};
pub use s_l1::s_l1_certificate;
pub use tangency::{tangency_certificate, TangencyOptions};

/// `2^-3, ..., 2^-8`.
pub fn default_eps_sweep() -> Vec<f64> {
    (3..=8).map(|k| 2f64.powi(-k)).collect()
}
