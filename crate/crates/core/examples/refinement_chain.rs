//! Finer information sets never increase the expected Shannon entropy or the
//! off-diagonal mass.

use decohere::ensemble::{self, EstimationMode};
use decohere::unravelling::PartitionModel;
use decohere::{Partition, PureState, UnravellingModel};

fn main() -> decohere::Result<()> {
    let weights = [0.1, 0.2, 0.15, 0.25, 0.2, 0.1];
    let x = vec![0.0, 1.0, 2.0, 0.0, 1.0, 2.0];
    let chain = [
        vec![vec![0, 1, 2, 3, 4, 5]],
        vec![vec![0, 1, 2], vec![3, 4, 5]],
        vec![vec![0, 1], vec![2], vec![3, 4, 5]],
        vec![vec![0], vec![1], vec![2], vec![3, 4], vec![5]],
        vec![vec![0], vec![1], vec![2], vec![3], vec![4], vec![5]],
    ];
    let base = PartitionModel::from_parts(&weights, x, chain[0].clone())?;
    let state = PureState::new(base.level_probs().to_vec(), vec![0.0, 0.4, 1.3])?;
    for blocks in chain {
        let partition = Partition::from_blocks(blocks.clone(), weights.len())?;
        let model = UnravellingModel::partition(base.with_partition(partition)?);
        let s = ensemble::summarize(&model, &state, None, EstimationMode::Exact)?;
        println!(
            "{:<40} offdiag_l1 = {:.6}  E[H(pi)] = {:.6}",
            format!("{blocks:?}"),
            s.density.value.offdiag_l1(),
            s.expected_shannon.value
        );
    }
    Ok(())
}
