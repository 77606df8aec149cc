//! Random phases alone: off-diagonal terms shrink by the characteristic
//! values of the phase noise, but the probabilities never move, so no
//! information is gained.

use decohere::ensemble::{self, EstimationMode};
use decohere::quantum_state;
use decohere::verifier::{self, CheckMode};
use decohere::{PhaseNoise, PureState, UnravellingModel};

fn main() -> decohere::Result<()> {
    let state = PureState::new(vec![0.3, 0.7], vec![0.0, 1.0])?;
    for half_width in [0.0, 0.5, 1.0, 2.0, std::f64::consts::PI] {
        let noise = if half_width == 0.0 {
            PhaseNoise::Degenerate
        } else {
            PhaseNoise::UniformSymmetric { half_width }
        };
        let model = UnravellingModel::phase_only(noise)?;
        let rho = ensemble::average_density(&model, &state, EstimationMode::Exact)?.value;
        println!(
            "half width {half_width:.3}: |rho_01| = {:.6}  S(rho) = {:.6}",
            rho.get(0, 1).norm(),
            quantum_state::vn_entropy(&rho)?
        );
    }
    let model = UnravellingModel::phase_only(PhaseNoise::UniformFull)?;
    let r = verifier::check_decoherence_chain(&model, &state, CheckMode::Exact)?;
    println!("chain verdict: {:?} ({})", r.verdict, r.note.unwrap_or_default());
    Ok(())
}
