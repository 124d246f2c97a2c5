//! Benchmark fixtures shared by the criterion targets.

use fracext::synthesis::RadialProfile;
use fracext::FracParams;

/// Parameter sets swept by the benchmarks.
pub fn sample_params() -> Vec<FracParams> {
    [0.25, 0.5, 0.75]
        .iter()
        .map(|&b| FracParams::new(b, 1.0, 3).expect("valid parameters"))
        .collect()
}

pub fn gaussian3() -> RadialProfile {
    RadialProfile::gaussian(3, 1.0).expect("valid datum")
}
