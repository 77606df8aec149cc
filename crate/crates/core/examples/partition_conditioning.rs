//! Partial information: four equally likely atoms, X = 1 on the first two and
//! X = 2 on the rest, observed only through the blocks {0, 1, 2} and {3}.

use decohere::ensemble::{self, EstimationMode};
use decohere::prob_space::{self, DEFAULT_INDEPENDENCE_TOL};
use decohere::unravelling::{self, PartitionModel};
use decohere::verifier::{self, CheckMode};
use decohere::{Observable, PureState, UnravellingModel};

fn main() -> decohere::Result<()> {
    let pm = PartitionModel::from_parts(&[0.25; 4], vec![1.0, 1.0, 2.0, 2.0], vec![vec![0, 1, 2], vec![3]])?;
    for (block, pi) in pm.conditioning().block_pi.iter().enumerate() {
        println!("block {block}: pi = {pi:?}");
    }
    let model = UnravellingModel::partition(pm);
    let state = PureState::uniform(2)?;

    let law = unravelling::exact_law(&model, &state)?;
    let (space, rvs) = law.as_space()?;
    let gram = prob_space::gram_independence(&space, &rvs, DEFAULT_INDEPENDENCE_TOL)?;
    println!("Gram matrix of pi: {}independent: {}", gram.gram, gram.independent);

    let s = ensemble::summarize(
        &model,
        &state,
        Some(&Observable::new(vec![1.0, 2.0])?),
        EstimationMode::Exact,
    )?;
    println!("rho = {}", s.density.value.entries());
    println!(
        "E[H(pi)] = {:.5}  E[Var] = {:.5}",
        s.expected_shannon.value,
        s.expected_variance.unwrap().value
    );

    let chain = verifier::check_decoherence_chain(&model, &state, CheckMode::Exact)?;
    for w in &chain.witnesses {
        println!("{:<22} {:.6} {:?} {:.6}", w.quantity, w.left, w.relation, w.right);
    }
    println!("verdict: {:?}", chain.verdict);
    Ok(())
}
