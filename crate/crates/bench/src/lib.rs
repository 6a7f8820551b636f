//! Inputs shared by the benchmarks.

use qplate_core::{distribute, make_standard_form, GaussianState, QPlateSpec, StandardFormParams};

pub fn source() -> GaussianState {
    make_standard_form(StandardFormParams::experimental()).expect("physical")
}

/// Balanced q-plate output of [`source`].
pub fn four_mode() -> GaussianState {
    distribute(&source(), &QPlateSpec::balanced()).expect("valid pipeline")
}

/// A four-mode output whose 2×2 splits pass PPT, so the iterative
/// criterion has to run to completion.
pub fn ppt_boundary() -> GaussianState {
    let p = StandardFormParams::new(
        1.488011510657284,
        1.544440055901617,
        -0.08386593840725087,
        0.1645642132168348,
    );
    distribute(
        &make_standard_form(p).expect("physical"),
        &QPlateSpec::balanced(),
    )
    .expect("valid pipeline")
}
