//! Experiments: truncation rates, Cauchy sequences, regularity probes and
//! inequality suites, with CSV/SVG reporting.

pub mod config;
pub mod fit;
pub mod inequality;
pub mod regularity;
pub mod report;
pub mod studies;

pub use config::Config;
pub use fit::{rate_fit, RateFit};
pub use inequality::{inequality_suite, InequalityReport};
pub use regularity::{regularity_probe, RegularityProbe, RegularityRow};
pub use report::{write_report, ReportFormat};
pub use studies::{cauchy_study, stability_ratio, truncation_study, CauchyStudy, ExperimentRecord, TruncationStudy};
