//! Dirichlet martingale transformations at increasing concentration, with
//! statistical certification at the lowest one.

use decohere::ensemble::{self, EstimationMode};
use decohere::verifier::{CheckMode, Evaluation};
use decohere::{Observable, PureState, UnravellingModel};

fn main() -> decohere::Result<()> {
    let state = PureState::new(vec![0.2, 0.3, 0.5], vec![0.0, 0.7, 1.9])?;
    let obs = Observable::new(vec![-1.0, 0.0, 1.0])?;
    let mode = EstimationMode::MonteCarlo {
        trials: 100_000,
        seed: 7,
    };
    println!("kappa   offdiag_l1   E[H(pi)]   E[Var]");
    for kappa in [1.0, 4.0, 16.0, 64.0] {
        let model = UnravellingModel::dirichlet(kappa)?;
        let s = ensemble::summarize(&model, &state, Some(&obs), mode)?;
        println!(
            "{kappa:>5}   {:.6}     {:.5}    {:.5}",
            s.density.value.offdiag_l1(),
            s.expected_shannon.value,
            s.expected_variance.unwrap().value
        );
    }

    let mode = CheckMode::Statistical {
        trials: 100_000,
        seeds: vec![1, 2, 3],
    };
    let eval = Evaluation::new(&UnravellingModel::dirichlet(1.0)?, &state, Some(&obs), mode)?;
    for r in [
        eval.mean_condition(),
        eval.decoherence_chain(),
        eval.uncertainty_reduction()?,
        eval.entropy_gain(),
    ] {
        println!("{:?}: {:?}", r.id, r.verdict);
    }
    Ok(())
}
