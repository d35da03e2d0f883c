//! Shared fixtures for the engine benchmarks.

use qamp_core::hilbert::{
    build_joint_state, AtomStateSpec, DensityMatrix, FieldStateSpec, HilbertLayout,
};
use qamp_core::liouville::{AmplifierModel, Frame, InteractionOrder};

/// The standard amplifier at a given truncation, in the interaction frame.
pub fn model(field_dim: usize) -> AmplifierModel {
    let omega_res = 1000.0;
    AmplifierModel {
        omega1: 0.0,
        omega2: omega_res,
        omega3: 1.2 * omega_res,
        omega_f: omega_res / 2.0,
        lambda: 1.0,
        gamma_h: 1e-3,
        gamma_c: 1e-3,
        nbar_h: 10.0,
        nbar_c: 0.1,
        order: InteractionOrder::TwoPhoton,
        frame: Frame::Interaction,
        layout: HilbertLayout::new(field_dim).unwrap(),
    }
    .validated()
    .unwrap()
}

/// Excited atom over a Poisson field: a generic dense-ish state.
pub fn state(field_dim: usize) -> DensityMatrix {
    build_joint_state(
        &AtomStateSpec::Level(2),
        &FieldStateSpec::PoissonMixed(4.0),
        HilbertLayout::new(field_dim).unwrap(),
    )
    .unwrap()
    .rho
}
