//! Checks shared by the acceptance runner and the focused integration tests.
//! Each check returns an [`Outcome`] that carries the measured quantity.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fakenews::archive::{neural_sequence, ArchivedModel, ModelArchive};
use fakenews::config::ExperimentConfig;
use fakenews::ensemble::{majority_vote, soft_vote, Prediction};
use fakenews::experiment::run_experiment;
use fakenews::features::SparseVector;
use fakenews::linear::{
    logistic_objective, svm_objective, train_lr, train_nb, train_svm, LinearKind, LinearModel,
    TrainConfig,
};
use fakenews::metrics::compute_metrics;
use fakenews::neural::{train_neural, Architecture, LstmClassifier, NeuralConfig};
use fakenews::preprocess::porter_stem;
use fakenews::toy;
use fakenews::{preprocess, Corpus, Label, PipelineKind, SequenceEncoding, Vocabulary};

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

impl Outcome {
    pub fn from_check(ok: bool, detail: impl Into<String>) -> Self {
        if ok {
            Outcome::Pass(detail.into())
        } else {
            Outcome::Fail(detail.into())
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Outcome::Pass(_))
    }

    /// Panics with the detail unless the outcome is a pass.
    pub fn expect_pass(self) {
        match self {
            Outcome::Pass(_) => {}
            other => panic!("{other:?}"),
        }
    }

    /// Fails if `elapsed` exceeds `budget`.
    pub fn within(self, elapsed: Duration, budget: Duration) -> Self {
        match self {
            Outcome::Pass(d) if elapsed > budget => {
                Outcome::Fail(format!("{d}; took {elapsed:.2?}, budget {budget:.0?}"))
            }
            other => other,
        }
    }
}

/// Central differences on O(1) objectives carry ~1e-10 of rounding noise,
/// so gradient components below this floor are compared on an absolute scale.
pub const GRADIENT_FLOOR: f64 = 1e-4;

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(GRADIENT_FLOOR)
}

/// Worst relative and absolute discrepancy over a gradient check.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GradError {
    pub relative: f64,
    pub absolute: f64,
}

impl GradError {
    fn record(&mut self, analytic: f64, numeric: f64) {
        self.relative = self.relative.max(relative_error(analytic, numeric));
        self.absolute = self.absolute.max((analytic - numeric).abs());
    }
}

pub fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

pub fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn tfidf_vectors(corpus: &Corpus) -> (Vocabulary, Vec<SparseVector>) {
    let vocab = Vocabulary::fit(corpus, PipelineKind::Classical, 1).unwrap();
    let xs = corpus
        .texts()
        .map(|t| vocab.tfidf(&preprocess(t, PipelineKind::Classical)))
        .collect();
    (vocab, xs)
}

fn sequences(corpus: &Corpus, max_len: usize) -> (Vocabulary, Vec<SequenceEncoding>) {
    let vocab = Vocabulary::fit(corpus, PipelineKind::Neural, 1).unwrap();
    let seqs = corpus
        .texts()
        .map(|t| neural_sequence(&vocab, t, max_len))
        .collect();
    (vocab, seqs)
}

// ---------------------------------------------------------------- TF-IDF

pub fn tfidf_fixture() -> Outcome {
    let corpus = toy::tfidf_fixture();
    let (vocab, xs) = tfidf_vectors(&corpus);
    let a = vocab.index_of("a").unwrap();
    let b = vocab.index_of("b").unwrap();
    let (wa, wb) = (xs[0].weight(a), xs[0].weight(b));
    let fixture_ok = (wa - 0.579739).abs() < 1e-5 && (wb - 0.814801).abs() < 1e-5;

    // Unit norm over a larger corpus, including documents with repeated tokens.
    let mut worst: f64 = 0.0;
    let big = toy::separable_corpus(100, 5);
    let (vocab2, _) = tfidf_vectors(&big);
    for text in big
        .texts()
        .chain(["covid covid covid hoax", "update update"])
    {
        let x = vocab2.tfidf(&preprocess(text, PipelineKind::Classical));
        if !x.is_empty() {
            worst = worst.max((x.norm() - 1.0).abs());
        }
    }
    Outcome::from_check(
        fixture_ok && worst <= 1e-9,
        format!("weights (a {wa:.6}, b {wb:.6}); max |norm - 1| = {worst:.1e}"),
    )
}

// ---------------------------------------------------------- naive Bayes

/// Smoothed-Bayes log-odds computed directly from integer counts by
/// multiplying per-token probabilities one occurrence at a time.
pub fn nb_brute_force(docs: &[Vec<u32>], labels: &[Label], alpha: f64, query: &[u32]) -> f64 {
    let v = query.len();
    let posterior = |class: Label| {
        let n_class = labels.iter().filter(|&&l| l == class).count() as f64;
        let mut counts = vec![0.0; v];
        for (d, &l) in docs.iter().zip(labels) {
            if l == class {
                for (c, &k) in counts.iter_mut().zip(d) {
                    *c += k as f64;
                }
            }
        }
        let total: f64 = counts.iter().sum();
        let mut p = n_class / docs.len() as f64;
        for i in 0..v {
            let theta = (counts[i] + alpha) / (total + alpha * v as f64);
            for _ in 0..query[i] {
                p *= theta;
            }
        }
        p
    };
    posterior(Label::Fake).ln() - posterior(Label::Real).ln()
}

fn counts_vector(counts: &[u32]) -> SparseVector {
    SparseVector::from_pairs(counts.iter().enumerate().map(|(i, &c)| (i, c as f64)))
}

/// Largest |model - oracle| over `cases` random corpora (≤ 5 docs, ≤ 5 token
/// types, counts ≤ 3).
pub fn nb_oracle_max_error(cases: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let n_docs = rng.gen_range(2..=5);
        let v = rng.gen_range(1..=5);
        let docs: Vec<Vec<u32>> = (0..n_docs)
            .map(|_| (0..v).map(|_| rng.gen_range(0..=3)).collect())
            .collect();
        let labels: Vec<Label> = loop {
            let ls: Vec<Label> = (0..n_docs)
                .map(|_| *Label::ALL.choose(&mut rng).unwrap())
                .collect();
            if ls.contains(&Label::Fake) && ls.contains(&Label::Real) {
                break ls;
            }
        };
        let alpha = *[1.0, 0.5, 0.1, 2.0].choose(&mut rng).unwrap();
        let xs: Vec<SparseVector> = docs.iter().map(|d| counts_vector(d)).collect();
        let model = train_nb(&xs, &labels, v, alpha).unwrap();
        for _ in 0..3 {
            let query: Vec<u32> = (0..v).map(|_| rng.gen_range(0..=3)).collect();
            let got = model.log_odds(&counts_vector(&query));
            worst = worst.max((got - nb_brute_force(&docs, &labels, alpha, &query)).abs());
        }
    }
    worst
}

pub fn nb_oracle() -> Outcome {
    let worst = nb_oracle_max_error(200, 2024);
    Outcome::from_check(
        worst <= 1e-12,
        format!("200 random corpora, max |error| = {worst:.1e}"),
    )
}

// ------------------------------------------------------ gradient checks

const LINEAR_H: f64 = 1e-6;
const NEURAL_H: f64 = 1e-5;

fn linear_problem(
    rng: &mut ChaCha8Rng,
    kind: LinearKind,
) -> (Vec<SparseVector>, Vec<Label>, LinearModel) {
    let dim = 6;
    let xs: Vec<SparseVector> = (0..10)
        .map(|_| {
            let pairs: Vec<(usize, f64)> = (0..dim)
                .filter(|_| rng.gen_bool(0.7))
                .collect::<Vec<_>>()
                .into_iter()
                .map(|j| (j, rng.gen_range(0.1..1.0)))
                .collect();
            SparseVector::from_pairs(pairs)
        })
        .collect();
    let labels: Vec<Label> = (0..xs.len()).map(|i| Label::ALL[i % 2]).collect();
    loop {
        let model = LinearModel {
            weights: (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            bias: rng.gen_range(-0.5..0.5),
            kind,
        };
        // The hinge is not differentiable at y*s = 1; keep every point away from it.
        let near_kink = kind == LinearKind::SupportVectorMachine
            && xs
                .iter()
                .zip(&labels)
                .any(|(x, l)| (1.0 - l.sign() * model.score(x)).abs() <= 1e-3);
        if !near_kink {
            return (xs, labels, model);
        }
    }
}

/// Max relative error between analytic and central-difference gradients.
pub fn linear_gradient_error(kind: LinearKind, seeds: u64) -> GradError {
    let objective = match kind {
        LinearKind::LogisticRegression => logistic_objective,
        LinearKind::SupportVectorMachine => svm_objective,
    };
    let l2 = 0.01;
    let mut worst = GradError::default();
    for seed in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (xs, labels, model) = linear_problem(&mut rng, kind);
        let analytic = objective(&model, &xs, &labels, l2);
        let loss_at = |m: &LinearModel| objective(m, &xs, &labels, l2).loss;
        for j in 0..=model.dim() {
            let mut plus = model.clone();
            let mut minus = model.clone();
            if j < model.dim() {
                plus.weights[j] += LINEAR_H;
                minus.weights[j] -= LINEAR_H;
            } else {
                plus.bias += LINEAR_H;
                minus.bias -= LINEAR_H;
            }
            let numeric = (loss_at(&plus) - loss_at(&minus)) / (2.0 * LINEAR_H);
            let a = if j < model.dim() {
                analytic.grad_weights[j]
            } else {
                analytic.grad_bias
            };
            worst.record(a, numeric);
        }
    }
    worst
}

/// Max relative error of BPTT against central differences on tiny models:
/// embed 3, hidden 2, four tokens followed by one padding slot.
pub fn neural_gradient_error(arch: Architecture, seeds: u64) -> GradError {
    let mut worst = GradError::default();
    for seed in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let slots = 6;
        let model = LstmClassifier::uniform(slots, 3, 2, 5, arch, 0.5, &mut rng);
        let mut indices: Vec<usize> = (0..4).map(|_| rng.gen_range(1..slots)).collect();
        indices.push(0);
        let seq = SequenceEncoding::new(indices);
        let label = *Label::ALL.choose(&mut rng).unwrap();
        let dense = model
            .bptt_gradients(&seq, label)
            .unwrap()
            .grads
            .to_dense(&model);
        let analytic: Vec<Vec<f64>> = dense.parameters().iter().map(|s| s.to_vec()).collect();
        for (p, block) in analytic.iter().enumerate() {
            for (k, &a) in block.iter().enumerate() {
                let mut plus = model.clone();
                plus.parameters_mut()[p][k] += NEURAL_H;
                let mut minus = model.clone();
                minus.parameters_mut()[p][k] -= NEURAL_H;
                let numeric = (plus.loss(&seq, label).unwrap() - minus.loss(&seq, label).unwrap())
                    / (2.0 * NEURAL_H);
                worst.record(a, numeric);
            }
        }
    }
    worst
}

pub fn gradient_checks() -> Outcome {
    let lr = linear_gradient_error(LinearKind::LogisticRegression, 20);
    let svm = linear_gradient_error(LinearKind::SupportVectorMachine, 20);
    let lstm = neural_gradient_error(Architecture::Unidirectional, 20);
    let bilstm = neural_gradient_error(Architecture::Bidirectional, 20);
    let show = |e: GradError| format!("{:.1e} (abs {:.1e})", e.relative, e.absolute);
    Outcome::from_check(
        lr.relative <= 1e-5
            && svm.relative <= 1e-5
            && lstm.relative <= 1e-4
            && bilstm.relative <= 1e-4,
        format!(
            "max rel. error LR {}, SVM {}, LSTM {}, biLSTM {}",
            show(lr),
            show(svm),
            show(lstm),
            show(bilstm)
        ),
    )
}

// ---------------------------------------------------------- convergence

fn accuracy(predicted: &[Label], truth: &[Label]) -> f64 {
    predicted.iter().zip(truth).filter(|(p, t)| p == t).count() as f64 / truth.len() as f64
}

/// Training accuracy of LR, SVM, LSTM and biLSTM on the convergence corpus,
/// each trained with its default settings.
pub fn convergence_accuracies() -> Vec<(&'static str, f64)> {
    let corpus = toy::convergence_corpus();
    let labels = corpus.labels().unwrap();
    let (vocab, xs) = tfidf_vectors(&corpus);
    let lr = train_lr(&xs, &labels, vocab.len(), &TrainConfig::default()).unwrap();
    let svm = train_svm(&xs, &labels, vocab.len(), &TrainConfig::default()).unwrap();
    let mut out = vec![
        (
            "lr",
            accuracy(
                &xs.iter().map(|x| lr.predict(x)).collect::<Vec<_>>(),
                &labels,
            ),
        ),
        (
            "svm",
            accuracy(
                &xs.iter().map(|x| svm.predict(x)).collect::<Vec<_>>(),
                &labels,
            ),
        ),
    ];
    let (nvocab, seqs) = sequences(&corpus, 64);
    for (name, arch) in [
        ("lstm", Architecture::Unidirectional),
        ("bilstm", Architecture::Bidirectional),
    ] {
        let model = train_neural(
            &seqs,
            &labels,
            nvocab.sequence_vocab_size(),
            arch,
            &NeuralConfig::default(),
        )
        .unwrap();
        let predicted: Vec<Label> = seqs.iter().map(|s| model.predict(s).unwrap()).collect();
        out.push((name, accuracy(&predicted, &labels)));
    }
    out
}

pub fn convergence() -> Outcome {
    let accs = convergence_accuracies();
    let detail = accs
        .iter()
        .map(|(n, a)| format!("{n} {a:.3}"))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome::from_check(
        accs.iter().all(|&(_, a)| a == 1.0),
        format!(
            "train accuracy on {} docs: {detail}",
            toy::convergence_corpus().len()
        ),
    )
}

// ------------------------------------------------------------- ensembles

fn preds(ps: &[f64]) -> Vec<Prediction> {
    ps.iter().map(|&p| Prediction::new(p)).collect()
}

/// Hand-computed fixtures, then every permutation of 5 members on 50 sets.
pub fn ensemble_correctness() -> Outcome {
    let mut failures = Vec::new();
    let mut expect = |what: &str, ok: bool| {
        if !ok {
            failures.push(what.to_string());
        }
    };
    let s = soft_vote(&preds(&[0.9, 0.6, 0.3])).unwrap();
    expect(
        "soft [0.9,0.6,0.3]",
        (s.p_fake - 0.6).abs() < 1e-15 && s.label == Label::Fake,
    );
    let s = soft_vote(&preds(&[0.5, 0.5])).unwrap();
    expect(
        "soft tie [0.5,0.5]",
        s.p_fake == 0.5 && s.label == Label::Real,
    );
    expect(
        "soft single",
        soft_vote(&preds(&[0.2])).unwrap() == Prediction::new(0.2),
    );
    expect(
        "majority F,F,R",
        majority_vote(&preds(&[0.9, 0.7, 0.2])).unwrap().label == Label::Fake,
    );
    expect(
        "majority F,R,R,R,F",
        majority_vote(&preds(&[0.8, 0.1, 0.3, 0.4, 0.9]))
            .unwrap()
            .label
            == Label::Real,
    );
    let m = majority_vote(&preds(&[0.9, 0.8, 0.1])).unwrap();
    expect(
        "majority p_fake 0.85",
        (m.p_fake - 0.85).abs() < 1e-15 && m.label == Label::Fake,
    );
    let m = majority_vote(&preds(&[0.5, 0.5, 0.5])).unwrap();
    expect(
        "majority all-0.5 tie",
        m.label == Label::Real && m.p_fake == 0.5,
    );
    expect(
        "majority even count",
        majority_vote(&preds(&[0.1, 0.9])).is_err(),
    );
    expect("empty soft vote", soft_vote(&[]).is_err());

    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut perms = Vec::new();
    permutations(&mut (0..5).collect(), 0, &mut perms);
    let mut checked = 0;
    for _ in 0..50 {
        let set: Vec<Prediction> = (0..5)
            .map(|_| {
                // Occasional exact 0.5 exercises the tie rule.
                if rng.gen_bool(0.1) {
                    Prediction::new(0.5)
                } else {
                    Prediction::new(rng.gen_range(0.0..1.0))
                }
            })
            .collect();
        let reference = majority_vote(&set).unwrap();
        for perm in &perms {
            let shuffled: Vec<Prediction> = perm.iter().map(|&i| set[i]).collect();
            checked += 1;
            if majority_vote(&shuffled).unwrap() != reference {
                failures.push(format!("permutation {perm:?} changed the vote"));
            }
        }
    }
    Outcome::from_check(
        failures.is_empty() && perms.len() == 120,
        if failures.is_empty() {
            format!("9 fixtures; {checked} permuted votes identical")
        } else {
            failures.join("; ")
        },
    )
}

pub fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

// --------------------------------------------------------------- metrics

/// Per-class F1 via the `2tp / (2tp + fp + fn)` identity, computed by
/// enumerating the confusion matrix cell by cell.
pub fn brute_force_weighted_f1(truth: &[Label], predicted: &[Label]) -> (f64, f64) {
    let mut cells: BTreeMap<(Label, Label), usize> = BTreeMap::new();
    for (&t, &p) in truth.iter().zip(predicted) {
        *cells.entry((t, p)).or_default() += 1;
    }
    let n = truth.len() as f64;
    let cell = |t, p| *cells.get(&(t, p)).unwrap_or(&0) as f64;
    let mut weighted = 0.0;
    for class in Label::ALL {
        let other = if class == Label::Fake {
            Label::Real
        } else {
            Label::Fake
        };
        let tp = cell(class, class);
        let fp = cell(other, class);
        let fn_ = cell(class, other);
        let f1 = if tp == 0.0 {
            0.0
        } else {
            2.0 * tp / (2.0 * tp + fp + fn_)
        };
        weighted += (tp + fn_) / n * f1;
    }
    let acc = (cell(Label::Fake, Label::Fake) + cell(Label::Real, Label::Real)) / n;
    (weighted, acc)
}

pub fn metrics_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let decode = |bits: u32| -> Vec<Label> {
        (0..4)
            .map(|i| {
                if bits >> i & 1 == 1 {
                    Label::Fake
                } else {
                    Label::Real
                }
            })
            .collect()
    };
    for t in 0..16 {
        for p in 0..16 {
            let (truth, predicted) = (decode(t), decode(p));
            let m = compute_metrics(&truth, &predicted).unwrap();
            let (f1, acc) = brute_force_weighted_f1(&truth, &predicted);
            worst = worst
                .max((m.weighted_f1 - f1).abs())
                .max((m.accuracy - acc).abs());
            if m.confusion.total() != 4 {
                worst = f64::INFINITY;
            }
            cases += 1;
        }
    }
    use Label::{Fake as F, Real as R};
    let example = compute_metrics(&[F, F, R, R], &[F, R, R, R])
        .unwrap()
        .weighted_f1;
    Outcome::from_check(
        cases == 256 && worst <= 1e-12 && (example - 11.0 / 15.0).abs() <= 1e-9,
        format!(
            "{cases} pairs, max deviation {worst:.1e}; worked example weighted F1 {example:.6}"
        ),
    )
}

// ---------------------------------------------- determinism & persistence

/// Writes a small train/validation/test split of the separable corpus and
/// a config training every model type plus both stock ensembles.
pub fn write_toy_experiment(dir: &Path, seed: u64) -> PathBuf {
    let corpus = toy::separable_corpus(40, 3);
    let parts = corpus.stratified_split(&[0.7, 0.15, 0.15], 5).unwrap();
    for (part, file) in parts.iter().zip(["train.tsv", "val.tsv", "test.tsv"]) {
        part.write_tsv(dir.join(file)).unwrap();
    }
    let config = format!(
        r#"seed = {seed}

[data]
train = "train.tsv"
validation = "val.tsv"
test = "test.tsv"

[features]
max_len = 12

[models.nb]
[models.lr]
[models.svm]
[models.nblr]
[models.lstm]
embed_dim = 8
hidden_dim = 8
epochs = 3
[models.bilstm]
embed_dim = 8
hidden_dim = 8
epochs = 3

[[ensembles]]
name = "majority5"
members = ["svm", "lr", "nb", "nblr", "bilstm"]
strategy = "majority_vote"

[[ensembles]]
name = "classical_soft"
members = ["svm", "nb", "nblr"]
strategy = "soft_vote"
"#
    );
    let path = dir.join("experiment.toml");
    std::fs::write(&path, config).unwrap();
    path
}

/// Random documents mixing known, stemmed-variant and unseen words.
pub fn random_documents(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<&str> = toy::FILLER
        .iter()
        .chain(&toy::FAKE_CUES)
        .chain(&toy::REAL_CUES)
        .copied()
        .chain(["hoaxes", "testing", "zzyzx", "Über", "42"])
        .collect();
    (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=12);
            (0..len)
                .map(|_| *words.choose(&mut rng).unwrap())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

pub fn determinism_and_persistence() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_toy_experiment(dir.path(), 21);
    let cfg = ExperimentConfig::load(&cfg_path).unwrap();
    let first = run_experiment(&cfg).unwrap();
    let second = run_experiment(&cfg).unwrap();
    let report_same = first.report.to_json() == second.report.to_json();
    let archives_same = first
        .archives
        .iter()
        .zip(&second.archives)
        .all(|(a, b)| a.to_text().unwrap() == b.to_text().unwrap());

    let mut mismatches = Vec::new();
    let docs = random_documents(100, 8);
    let dir_out = dir.path().join("out");
    first.write(&dir_out).unwrap();
    for archive in &first.archives {
        let path = dir_out
            .join("models")
            .join(format!("{}.model", archive.name));
        let loaded = ModelArchive::load(&path).unwrap();
        let same = docs.iter().all(|d| {
            let (a, b) = (
                archive.predict_text(d).unwrap(),
                loaded.predict_text(d).unwrap(),
            );
            a.p_fake.to_bits() == b.p_fake.to_bits() && a.label == b.label
        });
        if !same || loaded != *archive {
            mismatches.push(archive.name.clone());
        }
    }
    let kinds: Vec<String> = first
        .archives
        .iter()
        .map(|a| match &a.model {
            ArchivedModel::Single { name, .. } => name.to_string(),
            ArchivedModel::Ensemble { .. } => format!("ensemble:{}", a.name),
        })
        .collect();
    Outcome::from_check(
        report_same && archives_same && mismatches.is_empty() && kinds.len() == 8,
        format!(
            "reports identical: {report_same}, archives identical: {archives_same}; \
             bit-exact round trip on 100 docs for [{}]{}",
            kinds.join(", "),
            if mismatches.is_empty() {
                String::new()
            } else {
                format!("; MISMATCH {mismatches:?}")
            }
        ),
    )
}

// ------------------------------------------------------------- dataset

pub const DATASET_ENV: &str = "FAKENEWS_DATASET_DIR";

/// Five-member majority vote on the challenge data, if the user supplied it.
pub fn dataset_reproduction() -> Outcome {
    let Some(dir) = std::env::var_os(DATASET_ENV).map(PathBuf::from) else {
        return Outcome::Skip(format!("{DATASET_ENV} not set"));
    };
    let files = ["train.tsv", "val.tsv", "test.tsv"].map(|f| dir.join(f));
    if let Some(missing) = files.iter().find(|f| !f.is_file()) {
        return Outcome::Skip(format!("{} not found", missing.display()));
    }
    let config = format!(
        r#"seed = 13

[data]
train = {:?}
validation = {:?}
test = {:?}

[models.nb]
[models.lr]
[models.svm]
[models.nblr]
[models.bilstm]

[[ensembles]]
name = "majority5"
members = ["svm", "lr", "nb", "nblr", "bilstm"]
strategy = "majority_vote"
"#,
        files[0], files[1], files[2]
    );
    let cfg = match ExperimentConfig::from_toml(&config) {
        Ok(c) => c,
        Err(e) => return Outcome::Fail(format!("config: {e}")),
    };
    let (outcome, elapsed) = timed(|| run_experiment(&cfg));
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => return Outcome::Fail(format!("experiment failed: {e}")),
    };
    let f1 = outcome
        .report
        .weighted_f1("test", "majority5")
        .unwrap_or(f64::NAN);
    let singles = ["nb", "lr", "svm", "nblr", "bilstm"]
        .iter()
        .map(|m| {
            format!(
                "{m} {:.4}",
                outcome.report.weighted_f1("test", m).unwrap_or(f64::NAN)
            )
        })
        .collect::<Vec<_>>()
        .join(", ");
    Outcome::from_check(
        f1 >= 0.90,
        format!("test weighted F1 {f1:.4} (members: {singles}) in {elapsed:.1?}"),
    )
    .within(elapsed, Duration::from_secs(15 * 60))
}

// ---------------------------------------------------------------- Porter

pub fn porter_pairs() -> Vec<(String, String)> {
    std::fs::read_to_string(fixture_path("porter_fixtures.tsv"))
        .unwrap()
        .lines()
        .filter(|l| !l.is_empty())
        .map(|l| {
            let (w, s) = l.split_once('\t').expect("word<TAB>stem");
            (w.to_string(), s.to_string())
        })
        .collect()
}

pub fn porter_agreement() -> Outcome {
    let pairs = porter_pairs();
    let wrong: Vec<String> = pairs
        .iter()
        .filter(|(w, s)| porter_stem(w) != *s)
        .map(|(w, s)| format!("{w}: got {}, want {s}", porter_stem(w)))
        .collect();
    Outcome::from_check(
        pairs.len() >= 100 && wrong.is_empty(),
        if wrong.is_empty() {
            format!("{}/{} pairs agree", pairs.len(), pairs.len())
        } else {
            format!(
                "{} of {} disagree: {}",
                wrong.len(),
                pairs.len(),
                wrong.join("; ")
            )
        },
    )
}
