//! Acceptance criteria 1–8. Runs without the libtest harness so that one
//! PASS/FAIL line per criterion is always printed; exits non-zero if any
//! criterion fails.

use std::f64::consts::{LN_2, PI, TAU};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;

use decohere::ensemble::{self, EstimationMode};
use decohere::linalg;
use decohere::mc::{Engine, WORKERS_ENV};
use decohere::quantum_state::{self, DensityMatrix, Observable, PureState};
use decohere::unravelling::{DiscreteLaw, Draw, PartitionModel, PhaseNoise, PhaseSpec, UnravellingModel};
use decohere::verifier::{self, CheckMode, Evaluation, Margins, Verdict};
use decohere::C64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Counts checks and keeps the first few failure messages.
#[derive(Default)]
struct Tally {
    checked: usize,
    failed: usize,
    messages: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.messages.len() < 5 {
                self.messages.push(msg());
            }
        }
    }

    fn finish(self, what: &str) -> Outcome {
        if self.failed == 0 {
            Ok(format!("{} checks over {what}", self.checked))
        } else {
            Err(format!(
                "{}/{} checks failed over {what}; first: {}",
                self.failed,
                self.checked,
                self.messages.join("; ")
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// Enumeration helpers (independent of the library).

/// All restricted-growth strings of length `m`; each is a set partition given
/// as the block index of every atom.
fn set_partitions(m: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, max: usize, m: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == m {
            out.push(prefix.clone());
            return;
        }
        let next = if prefix.is_empty() { 0 } else { max + 1 };
        for b in 0..=next {
            prefix.push(b);
            go(prefix, max.max(b), m, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), 0, m, &mut out);
    out
}

fn block_count(rgs: &[usize]) -> usize {
    rgs.iter().max().map_or(0, |&b| b + 1)
}

/// Surjective level assignments of `m` atoms onto exactly `n` levels, up to
/// relabelling of levels.
fn level_assignments(m: usize, n: usize) -> Vec<Vec<usize>> {
    set_partitions(m).into_iter().filter(|r| block_count(r) == n).collect()
}

fn blocks_of(rgs: &[usize]) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); block_count(rgs)];
    for (a, &b) in rgs.iter().enumerate() {
        blocks[b].push(a);
    }
    blocks
}

fn refines(fine: &[usize], coarse: &[usize]) -> bool {
    (0..fine.len()).all(|a| (0..fine.len()).all(|b| fine[a] != fine[b] || coarse[a] == coarse[b]))
}

fn weight_vectors(m: usize) -> Vec<Vec<f64>> {
    let norm = |v: Vec<f64>| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect::<Vec<_>>()
    };
    vec![
        vec![1.0 / m as f64; m],
        norm((0..m).map(|a| (a + 1) as f64).collect()),
        norm((0..m).map(|a| 0.5f64.powi(a as i32)).collect()),
    ]
}

const LEVEL_VALUES: [f64; 3] = [-1.0, 0.5, 2.0];

fn phases(n: usize) -> Vec<f64> {
    (0..n).map(|k| 0.3 + 1.1 * k as f64).collect()
}

fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

// ---------------------------------------------------------------------------
// Brute-force per-atom oracle for partition conditioning.

struct Brute {
    p: Vec<f64>,
    rho: DMatrix<C64>,
    cross: DMatrix<f64>,
    shannon: f64,
    variance: f64,
    /// `π_k(a)·√w_a`, rows indexed by level.
    gram_factor: DMatrix<f64>,
}

fn brute_force(w: &[f64], level: &[usize], n: usize, theta: &[f64], block: &[usize]) -> Brute {
    let m = w.len();
    let mut p = vec![0.0; n];
    for a in 0..m {
        p[level[a]] += w[a];
    }
    let mut rho = DMatrix::<C64>::zeros(n, n);
    let mut cross = DMatrix::<f64>::zeros(n, n);
    let mut shannon = 0.0;
    let mut variance = 0.0;
    let mut gram_factor = DMatrix::<f64>::zeros(n, m);
    for a in 0..m {
        let mass: f64 = (0..m).filter(|&c| block[c] == block[a]).map(|c| w[c]).sum();
        let mut pi = vec![0.0; n];
        for c in (0..m).filter(|&c| block[c] == block[a]) {
            pi[level[c]] += w[c] / mass;
        }
        for i in 0..n {
            gram_factor[(i, a)] = pi[i] * w[a].sqrt();
            for j in 0..n {
                let s = (pi[i] * pi[j]).sqrt();
                cross[(i, j)] += w[a] * s;
                rho[(i, j)] += C64::from_polar(w[a] * s, theta[i] - theta[j]);
            }
        }
        shannon += w[a] * entropy(&pi);
        let mean: f64 = (0..n).map(|k| pi[k] * LEVEL_VALUES[k]).sum();
        let second: f64 = (0..n).map(|k| pi[k] * LEVEL_VALUES[k] * LEVEL_VALUES[k]).sum();
        variance += w[a] * (second - mean * mean);
    }
    Brute {
        p,
        rho,
        cross,
        shannon,
        variance,
        gram_factor,
    }
}

fn rank_independent(f: &DMatrix<f64>) -> bool {
    let sv = f.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    sv.len() == f.nrows() && min > 1e-9 * max
}

fn partition_model(w: &[f64], level: &[usize], block: &[usize]) -> UnravellingModel {
    let x: Vec<f64> = level.iter().map(|&k| LEVEL_VALUES[k]).collect();
    UnravellingModel::partition(PartitionModel::from_parts(w, x, blocks_of(block)).expect("valid partition model"))
}

// ---------------------------------------------------------------------------

fn criterion_1() -> Outcome {
    let mut t = Tally::default();
    let s = PureState::real(vec![0.5, 0.5]).map_err(|e| e.to_string())?;
    let obs = Observable::new(vec![0.0, 1.0]).map_err(|e| e.to_string())?;
    let m = UnravellingModel::ProjectiveMeasurement;
    let sum = ensemble::summarize(&m, &s, Some(&obs), EstimationMode::Exact).map_err(|e| e.to_string())?;
    let rho = sum.density.value.entries();
    let want = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.5, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.5, 0.0),
        ],
    );
    t.check(*rho == want, || format!("rho = {rho}"));
    let s0 = quantum_state::vn_entropy(&quantum_state::density_of(&s)).unwrap();
    let s1 = quantum_state::vn_entropy(&sum.density.value).unwrap();
    t.check(s0.abs() <= 1e-12, || format!("initial vN {s0}"));
    t.check((s1 - LN_2).abs() <= 1e-12, || format!("final vN {s1}"));
    let h0 = quantum_state::shannon_entropy(s.probs()).unwrap();
    t.check(h0 == LN_2, || format!("initial Shannon {h0}"));
    t.check(sum.expected_shannon.value == 0.0, || {
        format!("expected Shannon {}", sum.expected_shannon.value)
    });
    let v0 = quantum_state::variance(s.probs(), &obs).unwrap();
    let v1 = sum.expected_variance.as_ref().unwrap().value;
    t.check(v0 == 0.25, || format!("initial variance {v0}"));
    t.check(v1 == 0.0, || format!("expected variance {v1}"));
    t.finish("the measurement example")
}

fn criterion_2() -> Outcome {
    let mut t = Tally::default();
    let engine = Engine::new(1);
    let mut models = 0usize;
    let mut independent = 0usize;
    for m in 2..=6 {
        let partitions = set_partitions(m);
        for w in weight_vectors(m) {
            for n in 2..=3.min(m) {
                let theta = phases(n);
                let obs = Observable::new(LEVEL_VALUES[..n].to_vec()).unwrap();
                for level in level_assignments(m, n) {
                    for block in &partitions {
                        models += 1;
                        let b = brute_force(&w, &level, n, &theta, block);
                        let model = partition_model(&w, &level, block);
                        let state = PureState::new(b.p.clone(), theta.clone()).unwrap();
                        let s = ensemble::summarize_with(&engine, &model, &state, Some(&obs), EstimationMode::Exact)
                            .unwrap();
                        let ctx = || format!("m={m} w={w:?} level={level:?} blocks={block:?}");
                        let rho_err = s
                            .density
                            .value
                            .entries()
                            .iter()
                            .zip(b.rho.iter())
                            .map(|(x, y)| (x - y).norm())
                            .fold(0.0, f64::max);
                        t.check(rho_err <= 1e-12, || format!("{} density err {rho_err:e}", ctx()));
                        let cross_err = (&s.cross_terms.value - &b.cross).amax();
                        t.check(cross_err <= 1e-12, || format!("{} cross err {cross_err:e}", ctx()));
                        let h = s.expected_shannon.value;
                        t.check((h - b.shannon).abs() <= 1e-12, || {
                            format!("{} shannon {h} vs {}", ctx(), b.shannon)
                        });
                        let v = s.expected_variance.as_ref().unwrap().value;
                        t.check((v - b.variance).abs() <= 1e-12, || {
                            format!("{} variance {v} vs {}", ctx(), b.variance)
                        });

                        let ind = rank_independent(&b.gram_factor);
                        if ind {
                            independent += 1;
                            for i in 0..n {
                                for j in (i + 1)..n {
                                    let a = s.density.value.get(i, j).norm();
                                    let c = s.cross_terms.value[(i, j)];
                                    let bound = (b.p[i] * b.p[j]).sqrt();
                                    t.check(a <= c + 1e-12, || format!("{} |rho_{i}{j}| {a} > {c}", ctx()));
                                    t.check(bound - c > 1e-12, || format!("{} gap {:e}", ctx(), bound - c));
                                }
                            }
                        }
                        let eval =
                            Evaluation::with(&engine, Margins::default(), &model, &state, None, CheckMode::Exact)
                                .unwrap();
                        let verdict = eval.decoherence_chain().verdict;
                        let want = if ind { Verdict::Pass } else { Verdict::Inapplicable };
                        t.check(verdict == want, || {
                            format!("{} verdict {verdict:?}, want {want:?}", ctx())
                        });
                    }
                }
            }
        }
    }
    t.finish(&format!(
        "{models} partition models ({independent} with independent probabilities)"
    ))
}

fn criterion_3() -> Outcome {
    let mut t = Tally::default();
    let engine = Engine::from_env();
    let states: Vec<Vec<f64>> = vec![vec![0.5, 0.5], vec![0.2, 0.3, 0.5], vec![0.2; 5]];
    let seeds = vec![1, 2, 3];
    let trials = 200_000;
    for kappa in [1.0, 4.0, 16.0] {
        for p in &states {
            let n = p.len();
            let state = PureState::new(p.clone(), phases(n)).unwrap();
            let obs = Observable::ladder(n);
            let model = UnravellingModel::dirichlet(kappa).unwrap();
            let mode = CheckMode::Statistical {
                trials,
                seeds: seeds.clone(),
            };
            let eval = Evaluation::with(&engine, Margins::default(), &model, &state, Some(&obs), mode).unwrap();
            let ctx = format!("kappa={kappa} p={p:?}");
            let reports = [
                eval.mean_condition(),
                eval.decoherence_chain(),
                eval.uncertainty_reduction().unwrap(),
                eval.entropy_gain(),
            ];
            for r in &reports {
                t.check(r.verdict == Verdict::Pass, || {
                    let bad: Vec<_> = r.witnesses.iter().filter(|w| !w.holds).map(|w| &w.quantity).collect();
                    format!("{ctx} {:?} {:?} at {bad:?}", r.id, r.verdict)
                });
            }
            for run in eval.runs() {
                for i in 0..n {
                    for j in (i + 1)..n {
                        let (a, b) = (kappa * p[i], kappa * p[j]);
                        let oracle = (ln_gamma(a + 0.5) - ln_gamma(a) + ln_gamma(b + 0.5) - ln_gamma(b)).exp() / kappa;
                        let est = run.cross_terms.value[(i, j)];
                        let se = run.cross_terms.std_err[(i, j)];
                        t.check((est - oracle).abs() <= 4.0 * se, || {
                            format!("{ctx} seed {:?} cross_{i}{j} {est} vs {oracle} (se {se:e})", run.seed)
                        });
                    }
                }
            }
        }
    }
    t.finish("9 Dirichlet settings x 3 seeds at N = 200000")
}

fn criterion_4() -> Outcome {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut states = vec![
        PureState::real(vec![0.3, 0.7]).unwrap(),
        PureState::uniform(2).unwrap(),
        PureState::new(vec![0.2, 0.3, 0.5], vec![0.0, 0.7, 1.9]).unwrap(),
    ];
    for n in 2..=8 {
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let s: f64 = raw.iter().sum();
        let th: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
        states.push(PureState::new(raw.iter().map(|x| x / s).collect(), th).unwrap());
    }
    let noises = [
        PhaseSpec::All(PhaseNoise::UniformFull),
        PhaseSpec::All(PhaseNoise::UniformSymmetric { half_width: 1.3 }),
        PhaseSpec::All(PhaseNoise::Degenerate),
    ];
    for s in &states {
        for r in verifier::check_equality_cases(s).unwrap() {
            t.check(r.pass, || {
                let bad: Vec<_> = r.witnesses.iter().filter(|w| !w.holds).collect();
                format!("n={} {:?}: {bad:?}", s.dim(), r.id)
            });
        }
        let p = s.probs();
        let mixed = PhaseSpec::PerIndex(
            (0..s.dim())
                .map(|k| match k % 3 {
                    0 => PhaseNoise::UniformFull,
                    1 => PhaseNoise::UniformSymmetric { half_width: 0.4 },
                    _ => PhaseNoise::Degenerate,
                })
                .collect(),
        );
        for spec in noises.iter().cloned().chain([mixed]) {
            let model = UnravellingModel::PhaseOnly(spec.clone());
            let cross = ensemble::cross_term_matrix(&model, s, EstimationMode::Exact)
                .unwrap()
                .value;
            for i in 0..s.dim() {
                for j in 0..s.dim() {
                    let want = (p[i] * p[j]).sqrt();
                    t.check((cross[(i, j)] - want).abs() <= 1e-14, || {
                        format!("{spec:?} cross_{i}{j} {} vs {want}", cross[(i, j)])
                    });
                }
            }
        }
    }
    t.finish(&format!("{} initial states", states.len()))
}

fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -rng.random_range(1e-12..1.0f64).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

fn criterion_5() -> Outcome {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut constant = 0;
    for case in 0..1000 {
        let n = rng.random_range(2..=5);
        let k = rng.random_range(1..=8);
        let kind = case % 10;
        let shared = Draw {
            pi: random_simplex(&mut rng, n),
            phi: (0..n).map(|_| rng.random_range(0.0..TAU)).collect(),
        };
        let weights = random_simplex(&mut rng, k);
        let points: Vec<(f64, Draw)> = weights
            .iter()
            .map(|&w| {
                let d = match kind {
                    0 => shared.clone(),
                    1 => Draw {
                        pi: random_simplex(&mut rng, n),
                        phi: shared.phi.clone(),
                    },
                    _ => Draw {
                        pi: random_simplex(&mut rng, n),
                        phi: (0..n).map(|_| rng.random_range(0.0..TAU)).collect(),
                    },
                };
                (w, d)
            })
            .collect();
        let law = DiscreteLaw::new(points).unwrap();
        let s = ensemble::summarize_law(&law, None);
        let mean = &s.mean_pi.value;
        for i in 0..n {
            for j in (i + 1)..n {
                let ez = s.density.value.get(i, j).norm();
                let eabs = s.cross_terms.value[(i, j)];
                let cs = (mean[i] * mean[j]).sqrt();
                t.check(ez <= eabs + 1e-12, || format!("case {case}: |E Z| {ez} > E|Z| {eabs}"));
                t.check(eabs <= cs + 1e-12, || format!("case {case}: E sqrt {eabs} > {cs}"));
                if kind <= 1 {
                    t.check((eabs - ez).abs() <= 1e-15, || {
                        format!("case {case}: constant phases, |E Z| - E|Z| = {:e}", eabs - ez)
                    });
                }
                if kind == 0 {
                    t.check((cs - eabs).abs() <= 1e-15, || {
                        format!("case {case}: constant law, CS gap {:e}", cs - eabs)
                    });
                }
            }
        }
        if kind == 0 {
            constant += 1;
        }
    }
    t.finish(&format!(
        "1000 random laws ({constant} constant, 100 with constant phases only)"
    ))
}

fn criterion_6() -> Outcome {
    let mut t = Tally::default();
    let engine = Engine::new(1);
    let mut pairs_checked = 0usize;
    for m in 2..=6 {
        let partitions = set_partitions(m);
        let mut pairs = Vec::new();
        for (f, fine) in partitions.iter().enumerate() {
            for (c, coarse) in partitions.iter().enumerate() {
                if f != c && refines(fine, coarse) {
                    pairs.push((f, c));
                }
            }
        }
        for w in weight_vectors(m).into_iter().take(2) {
            for n in 2..=3.min(m) {
                let theta = phases(n);
                for level in level_assignments(m, n) {
                    let mut p = vec![0.0; n];
                    for a in 0..m {
                        p[level[a]] += w[a];
                    }
                    let state = PureState::new(p, theta.clone()).unwrap();
                    let stats: Vec<(f64, f64)> = partitions
                        .iter()
                        .map(|block| {
                            let model = partition_model(&w, &level, block);
                            let s =
                                ensemble::summarize_with(&engine, &model, &state, None, EstimationMode::Exact).unwrap();
                            (s.density.value.offdiag_l1(), s.expected_shannon.value)
                        })
                        .collect();
                    for &(f, c) in &pairs {
                        pairs_checked += 1;
                        let ctx = || format!("m={m} level={level:?} {:?} refines {:?}", partitions[f], partitions[c]);
                        t.check(stats[f].0 <= stats[c].0 + 1e-12, || {
                            format!("{} offdiag L1 {} > {}", ctx(), stats[f].0, stats[c].0)
                        });
                        t.check(stats[f].1 <= stats[c].1 + 1e-12, || {
                            format!("{} Shannon {} > {}", ctx(), stats[f].1, stats[c].1)
                        });
                    }
                }
            }
        }
    }
    t.finish(&format!("{pairs_checked} refinement pairs (every step of every chain)"))
}

fn strip_wall_clock(s: &str) -> String {
    s.lines()
        .filter(|l| !l.contains("\"wall_clock_seconds\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn criterion_7() -> Outcome {
    let mut t = Tally::default();
    let bin = env!("CARGO_BIN_EXE_decohere");
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    for name in ["kappa_sweep", "partition_chain", "measurement"] {
        let mut outputs: Vec<(usize, String, Option<String>)> = Vec::new();
        for workers in [1usize, 2, 8] {
            let dir = tmp.path().join(format!("{name}_{workers}"));
            let status = Command::new(bin)
                .arg("run")
                .arg(configs.join(format!("{name}.json")))
                .arg("--output-dir")
                .arg(&dir)
                .arg("--quiet")
                .env(WORKERS_ENV, workers.to_string())
                .status()
                .map_err(|e| e.to_string())?;
            t.check(status.code() == Some(0), || {
                format!("{name} workers={workers}: {status}")
            });
            let report = std::fs::read_to_string(dir.join("report.json")).map_err(|e| e.to_string())?;
            let csv = std::fs::read_to_string(dir.join("trajectories.csv")).ok();
            outputs.push((workers, strip_wall_clock(&report), csv));
        }
        let (_, base_report, base_csv) = &outputs[0];
        for (w, report, csv) in &outputs[1..] {
            t.check(report == base_report, || {
                format!("{name}: report differs at {w} workers")
            });
            t.check(csv == base_csv, || {
                format!("{name}: trajectories differ at {w} workers")
            });
        }
    }
    t.finish("3 configs at worker counts 1, 2, 8")
}

/// `A ← G A G†` for a complex Givens rotation `G` on coordinates `i, j`.
fn givens(a: &mut DMatrix<C64>, i: usize, j: usize, theta: f64, alpha: f64) {
    let (s, c) = theta.sin_cos();
    let e = C64::from_polar(1.0, alpha);
    let n = a.nrows();
    for k in 0..n {
        let (x, y) = (a[(i, k)], a[(j, k)]);
        a[(i, k)] = x * c - e * y * s;
        a[(j, k)] = e.conj() * x * s + y * c;
    }
    for k in 0..n {
        let (x, y) = (a[(k, i)], a[(k, j)]);
        a[(k, i)] = x * c - e.conj() * y * s;
        a[(k, j)] = e * x * s + y * c;
    }
}

fn rotated(spectrum: &[f64], rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let n = spectrum.len();
    let mut a = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(spectrum[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    for _ in 0..(2 * n * n) {
        let i = rng.random_range(0..n);
        let j = (i + rng.random_range(1..n)) % n;
        givens(&mut a, i, j, rng.random_range(0.0..PI), rng.random_range(0.0..TAU));
    }
    (&a + a.adjoint()).map(|z| z * 0.5)
}

fn criterion_8() -> Outcome {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut largest = 0;
    for case in 0..200 {
        let n = if case == 0 { 64 } else { rng.random_range(2..=64) };
        largest = largest.max(n);
        let mut spectrum: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        if case % 4 == 0 {
            for k in (1..n).step_by(3) {
                spectrum[k] = spectrum[k - 1];
            }
        }
        let a = rotated(&spectrum, &mut rng);
        let got = linalg::hermitian_eigenvalues(&a).map_err(|e| e.to_string())?;
        spectrum.sort_by(|x, y| y.total_cmp(x));
        let scale = spectrum.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let err = got
            .iter()
            .zip(&spectrum)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        t.check(err <= 1e-10 * scale, || {
            format!("case {case} n={n}: eigenvalue error {err:e}")
        });

        let mut probs = random_simplex(&mut rng, n);
        if case % 5 == 0 {
            probs[0] = 0.0;
            let s: f64 = probs.iter().sum();
            probs.iter_mut().for_each(|x| *x /= s);
        }
        let rho = DensityMatrix::new(rotated(&probs, &mut rng)).map_err(|e| e.to_string())?;
        let s = quantum_state::vn_entropy(&rho).map_err(|e| e.to_string())?;
        let want = entropy(&probs);
        t.check((s - want).abs() <= 1e-8, || {
            format!("case {case} n={n}: vN {s} vs {want}")
        });
    }
    t.finish(&format!("200 rotated spectra (n up to {largest})"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("measurement example end-to-end", criterion_1),
        ("partition conditioning vs brute-force oracle", criterion_2),
        ("statistical certification, Dirichlet martingale", criterion_3),
        ("equality edge cases", criterion_4),
        ("Jensen and Cauchy-Schwarz numerics", criterion_5),
        ("refinement monotonicity", criterion_6),
        ("reproducibility across worker counts", criterion_7),
        ("eigensolver contract", criterion_8),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail} ({secs:.1}s)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail} ({secs:.1}s)", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
