//! Finite probability spaces, partitions and conditional probabilities.
//!
//! A σ-algebra on a finite atom set is always generated by a partition, so an
//! information set is represented here as a [`Partition`]. Conditioning the
//! indicator functions `1{X = x_i}` on a partition gives block-constant random
//! probabilities `π_i` whose means equal `p_i = P(X = x_i)` by the tower
//! property.
//!
//! All sums over atoms run in descending-weight order (ties by atom index),
//! fixed once when the space is built.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;

/// Tolerance on `Σ w = 1` accepted by [`FiniteProbabilitySpace::new`].
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Default relative eigenvalue threshold for [`gram_independence`].
pub const DEFAULT_INDEPENDENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteProbabilitySpace {
    weights: Vec<f64>,
    order: Vec<usize>,
}

impl FiniteProbabilitySpace {
    /// Validates and renormalizes `weights`; atom `k` carries `weights[k]`.
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (atom, &weight) in weights.iter().enumerate() {
            if weight < 0.0 || !weight.is_finite() {
                return Err(Error::NegativeWeight { atom, weight });
            }
        }
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
        let total: f64 = order.iter().map(|&k| weights[k]).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::WeightSum(total));
        }
        let weights = weights.iter().map(|w| w / total).collect();
        Ok(Self { weights, order })
    }

    /// Uniform weights over `atom_count` atoms.
    pub fn uniform(atom_count: usize) -> Result<Self> {
        if atom_count == 0 {
            return Err(Error::EmptySpace);
        }
        Self::new(&vec![1.0 / atom_count as f64; atom_count])
    }

    pub fn atom_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> f64 {
        self.weights[atom]
    }

    /// Atom indices in descending-weight order.
    pub fn summation_order(&self) -> &[usize] {
        &self.order
    }

    /// Total weight of a set of atoms, summed in descending-weight order.
    pub fn measure(&self, atoms: &[usize]) -> f64 {
        let mut sorted = atoms.to_vec();
        sorted.sort_by(|&a, &b| self.weights[b].total_cmp(&self.weights[a]).then(a.cmp(&b)));
        sorted.iter().map(|&k| self.weights[k]).sum()
    }
}

/// `build_space` with an explicit atom count.
pub fn build_space(atom_count: usize, weights: &[f64]) -> Result<FiniteProbabilitySpace> {
    if atom_count == 0 {
        return Err(Error::EmptySpace);
    }
    if weights.len() != atom_count {
        return Err(Error::AtomCount {
            expected: atom_count,
            got: weights.len(),
        });
    }
    FiniteProbabilitySpace::new(weights)
}

/// A real-valued function on the atoms of a space.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomVariable {
    values: Vec<f64>,
}

impl RandomVariable {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn constant(atom_count: usize, c: f64) -> Self {
        Self::new(vec![c; atom_count])
    }

    pub fn indicator(atom_count: usize, atoms: &[usize]) -> Self {
        let mut values = vec![0.0; atom_count];
        for &a in atoms {
            values[a] = 1.0;
        }
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check(&self, space: &FiniteProbabilitySpace) -> Result<()> {
        if self.values.len() != space.atom_count() {
            return Err(Error::SpaceMismatch {
                expected: space.atom_count(),
                got: self.values.len(),
            });
        }
        Ok(())
    }

    /// Sorted distinct values.
    pub fn levels(&self) -> Vec<f64> {
        let mut levels = self.values.clone();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        levels
    }
}

/// `Σ_ω w(ω) rv(ω)`, exact summation in descending-weight order.
pub fn expect(space: &FiniteProbabilitySpace, rv: &RandomVariable) -> Result<f64> {
    rv.check(space)?;
    Ok(space.order.iter().map(|&k| space.weights[k] * rv.values[k]).sum())
}

/// Expectation of a complex random variable given as one value per atom.
pub fn expect_complex(space: &FiniteProbabilitySpace, values: &[C64]) -> Result<C64> {
    if values.len() != space.atom_count() {
        return Err(Error::SpaceMismatch {
            expected: space.atom_count(),
            got: values.len(),
        });
    }
    Ok(space.order.iter().map(|&k| values[k] * space.weights[k]).sum())
}

/// Disjoint nonempty blocks of atom indices covering a space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    /// Validates `blocks` against `space`: disjoint, covering, and each block
    /// of strictly positive weight.
    pub fn new(blocks: Vec<Vec<usize>>, space: &FiniteProbabilitySpace) -> Result<Self> {
        let part = Self::from_blocks(blocks, space.atom_count())?;
        for (b, block) in part.blocks.iter().enumerate() {
            if space.measure(block) <= 0.0 {
                return Err(Error::InvalidPartition(format!("block {b} has zero weight")));
            }
        }
        Ok(part)
    }

    /// Structural validation only (no weights).
    pub fn from_blocks(blocks: Vec<Vec<usize>>, atom_count: usize) -> Result<Self> {
        let mut block_of = vec![usize::MAX; atom_count];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} is empty")));
            }
            for &atom in block {
                if atom >= atom_count {
                    return Err(Error::InvalidPartition(format!(
                        "atom {atom} out of range for {atom_count} atoms"
                    )));
                }
                if block_of[atom] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "atom {atom} appears in more than one block"
                    )));
                }
                block_of[atom] = b;
            }
        }
        if let Some(atom) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidPartition(format!("atom {atom} is not covered")));
        }
        Ok(Self { blocks, block_of })
    }

    /// The one-block partition: no information.
    pub fn trivial(atom_count: usize) -> Self {
        Self::from_blocks(vec![(0..atom_count).collect()], atom_count).expect("trivial partition is valid")
    }

    /// All singletons: full information.
    pub fn finest(atom_count: usize) -> Self {
        Self::from_blocks((0..atom_count).map(|a| vec![a]).collect(), atom_count).expect("finest partition is valid")
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, atom: usize) -> usize {
        self.block_of[atom]
    }

    pub fn atom_count(&self) -> usize {
        self.block_of.len()
    }

    /// True if every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.atom_count() == coarser.atom_count()
            && self.blocks.iter().all(|block| {
                let b = coarser.block_of[block[0]];
                block.iter().all(|&a| coarser.block_of[a] == b)
            })
    }
}

/// Result of conditioning the level indicators of `X` on a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Conditioning {
    /// Distinct levels `x_1 < … < x_n`.
    pub levels: Vec<f64>,
    /// `p_i = P(X = x_i)`.
    pub level_probs: Vec<f64>,
    /// `π_i` as random variables on the atoms.
    pub pi: Vec<RandomVariable>,
    /// `π(B)` for each block, indexed `[block][level]`.
    pub block_pi: Vec<Vec<f64>>,
    /// `P(B)` for each block.
    pub block_weights: Vec<f64>,
}

impl Conditioning {
    /// `Σ_B P(B) H(π(B))` in nats.
    pub fn expected_shannon(&self) -> f64 {
        let mut idx: Vec<usize> = (0..self.block_weights.len()).collect();
        idx.sort_by(|&a, &b| self.block_weights[b].total_cmp(&self.block_weights[a]).then(a.cmp(&b)));
        idx.iter()
            .map(|&b| {
                let h: f64 = self.block_pi[b]
                    .iter()
                    .filter(|&&x| x > 0.0)
                    .map(|&x| -x * x.ln())
                    .sum();
                self.block_weights[b] * h
            })
            .sum()
    }
}

/// Conditions the indicators `1{X = x_i}` on `partition`.
///
/// `x` must take exactly `expected_levels` distinct values, each with
/// positive probability. Levels are ordered ascending.
pub fn condition(
    space: &FiniteProbabilitySpace,
    x: &RandomVariable,
    partition: &Partition,
    expected_levels: usize,
) -> Result<Conditioning> {
    x.check(space)?;
    if partition.atom_count() != space.atom_count() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} atoms, space has {}",
            partition.atom_count(),
            space.atom_count()
        )));
    }
    let levels = x.levels();
    if levels.len() != expected_levels {
        return Err(Error::LevelCount {
            expected: expected_levels,
            got: levels.len(),
        });
    }
    let level_of: Vec<usize> = x
        .values
        .iter()
        .map(|v| levels.iter().position(|l| l == v).expect("level present"))
        .collect();

    let n = levels.len();
    let mut level_probs = vec![0.0; n];
    for &k in &space.order {
        level_probs[level_of[k]] += space.weights[k];
    }
    if let Some(i) = level_probs.iter().position(|&p| p <= 0.0) {
        return Err(Error::NullLevel { level: levels[i] });
    }

    let mut block_pi = Vec::with_capacity(partition.blocks.len());
    let mut block_weights = Vec::with_capacity(partition.blocks.len());
    for (b, block) in partition.blocks.iter().enumerate() {
        let mut atoms = block.clone();
        atoms.sort_by(|&a, &c| space.weights[c].total_cmp(&space.weights[a]).then(a.cmp(&c)));
        let mut joint = vec![0.0; n];
        let mut total = 0.0;
        for &k in &atoms {
            joint[level_of[k]] += space.weights[k];
            total += space.weights[k];
        }
        if total <= 0.0 {
            return Err(Error::InvalidPartition(format!("block {b} has zero weight")));
        }
        block_pi.push(joint.iter().map(|j| j / total).collect::<Vec<f64>>());
        block_weights.push(total);
    }

    let pi = (0..n)
        .map(|i| {
            RandomVariable::new(
                (0..space.atom_count())
                    .map(|k| block_pi[partition.block_of[k]][i])
                    .collect(),
            )
        })
        .collect();

    Ok(Conditioning {
        levels,
        level_probs,
        pi,
        block_pi,
        block_weights,
    })
}

/// Outcome of a Gram-matrix linear-independence test.
#[derive(Debug, Clone, PartialEq)]
pub struct GramTest {
    pub independent: bool,
    /// `G_ij = E[rv_i rv_j]`.
    pub gram: DMatrix<f64>,
    /// Eigenvalues of `G`, descending.
    pub eigenvalues: Vec<f64>,
}

/// Decides whether nonzero constants `λ` with `Σ λ_k rv_k = 0` a.s. exist.
///
/// Independent iff the smallest Gram eigenvalue exceeds `tol` times the
/// largest.
pub fn gram_independence(space: &FiniteProbabilitySpace, rvs: &[RandomVariable], tol: f64) -> Result<GramTest> {
    if rvs.is_empty() {
        return Err(Error::NoVariables);
    }
    for rv in rvs {
        rv.check(space)?;
    }
    let m = rvs.len();
    let mut gram = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let g: f64 = space
                .order
                .iter()
                .map(|&k| space.weights[k] * rvs[i].values[k] * rvs[j].values[k])
                .sum();
            gram[(i, j)] = g;
            gram[(j, i)] = g;
        }
    }
    let eigenvalues = linalg::symmetric_eigenvalues(&gram)?;
    let largest = eigenvalues[0];
    let smallest = eigenvalues[m - 1];
    let independent = largest > 0.0 && smallest > tol * largest;
    Ok(GramTest {
        independent,
        gram,
        eigenvalues,
    })
}
