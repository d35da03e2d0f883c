use qamp_core::hilbert::{build_joint_state, AtomStateSpec, FieldStateSpec, HilbertLayout};
use qamp_core::integrate::Rk4Stepper;
use qamp_core::liouville::{AmplifierModel, Frame, InteractionOrder, Liouvillian};

fn main() {
    let n = 112usize;
    let model = AmplifierModel {
        omega1: 0.0, omega2: 1000.0, omega3: 1200.0, omega_f: 500.0,
        lambda: 1.0, gamma_h: 0.01, gamma_c: 0.01, nbar_h: 10.0, nbar_c: 0.1,
        order: InteractionOrder::TwoPhoton, frame: Frame::Interaction,
        layout: HilbertLayout::new(n).unwrap(),
    }.validated().unwrap();
    let rho0 = build_joint_state(&AtomStateSpec::Level(2), &FieldStateSpec::Vacuum, model.layout).unwrap().rho;
    let l = Liouvillian::new(&model).unwrap();
    let dt = 0.0115;
    let mut st = Rk4Stepper::new(l, rho0.matrix().view()).unwrap();
    for k in 1..=5 {
        for _ in 0..100 { st.step(dt); }
        let y = st.state_slice();
        let mut min_nz = f64::INFINITY;
        let mut subnormals = 0usize;
        for z in y {
            for v in [z.re.abs(), z.im.abs()] {
                if v > 0.0 {
                    if v < min_nz { min_nz = v; }
                    if v < f64::MIN_POSITIVE { subnormals += 1; }
                }
            }
        }
        let m = st.state_matrix();
        let eigs = qamp_core::hilbert::DensityMatrix::from_matrix_unchecked(rho0.space(), m).eigenvalues();
        let bad = eigs.iter().filter(|v| !v.is_finite()).count();
        let min = eigs.iter().copied().fold(f64::INFINITY, f64::min);
        println!("after {} steps: min |entry| = {:.3e}, subnormals = {}, nonfinite eigs = {}, min eig = {:.3e}",
            100 * k, min_nz, subnormals, bad, min);
    }
}
