//! A projective measurement of an equal superposition: the averaged state is
//! maximally mixed while every individual outcome is a basis state.

use decohere::ensemble::{self, EstimationMode};
use decohere::quantum_state::{self, Observable, PureState};
use decohere::UnravellingModel;

fn main() -> decohere::Result<()> {
    let state = PureState::uniform(2)?;
    let obs = Observable::new(vec![0.0, 1.0])?;
    let model = UnravellingModel::ProjectiveMeasurement;
    let s = ensemble::summarize(&model, &state, Some(&obs), EstimationMode::Exact)?;

    println!("rho = {}", s.density.value.entries());
    println!(
        "von Neumann entropy: {:.6} -> {:.6}",
        quantum_state::vn_entropy(&quantum_state::density_of(&state))?,
        quantum_state::vn_entropy(&s.density.value)?
    );
    println!(
        "Shannon entropy:     {:.6} -> {:.6}",
        quantum_state::shannon_entropy(state.probs())?,
        s.expected_shannon.value
    );
    println!(
        "variance of X:       {:.6} -> {:.6}",
        quantum_state::variance(state.probs(), &obs)?,
        s.expected_variance.unwrap().value
    );
    Ok(())
}
