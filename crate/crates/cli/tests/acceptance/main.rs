//! Acceptance suite: one test per criterion, each checked at its stated
//! tolerance against an independent reference. Run with `--nocapture` to see
//! the per-criterion pass lines.

mod oracles;

use std::path::Path;
use std::process::Command;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use threatsift_core::eval::{self, Confusion};
use threatsift_core::ingest::{CveEntry, Document, Label};
use threatsift_core::linker;
use threatsift_core::ocsvm::{self, KernelSpec};
use threatsift_core::relevance;
use threatsift_core::synth;
use threatsift_core::textprep::{normalize, StopwordSet};
use threatsift_core::vectorspace::{embed, SparseVector, Vocabulary};
use threatsift_core::{CentroidModel, Verdict};

fn pass(number: u32, what: &str) {
    println!("[PASS] criterion {number}: {what}");
}

fn sw() -> &'static StopwordSet {
    StopwordSet::bundled_default()
}

#[test]
fn criterion_1_metric_reproduction() {
    let m = eval::metrics(&Confusion {
        true_pos: 53,
        false_pos: 8,
        false_neg: 179,
        true_neg: 0,
    });
    assert!(
        (m.precision - 0.869).abs() <= 1e-3,
        "precision {}",
        m.precision
    );
    assert!((m.recall - 0.228).abs() <= 1e-3, "recall {}", m.recall);
    assert!((m.f1 - 0.361).abs() <= 1e-3, "f1 {}", m.f1);

    let f1 = eval::f1_score(0.851, 0.517);
    assert!((f1 - 0.643).abs() <= 1e-3, "f1 {f1}");
    pass(1, "baseline and best-operating-point metrics within 1e-3");
}

#[test]
fn criterion_2_tfidf_exactness() {
    let doc = |tokens: &[&str]| -> Vec<String> { tokens.iter().map(|s| s.to_string()).collect() };
    let corpus = [
        doc(&["buffer", "overflow"]),
        doc(&["buffer", "overflow", "attack"]),
        doc(&["sql", "injection"]),
    ];
    let vocab = Vocabulary::fit(&corpus).unwrap();

    // Hand-computed: N = 3; buffer/overflow in 2 docs, the rest in 1.
    let ln_3_2 = (3.0f64 / 2.0).ln();
    let ln_3 = 3.0f64.ln();
    type DocWeights<'a> = (&'a [&'a str], &'a [(&'a str, f64)]);
    let expected: &[DocWeights] = &[
        (
            &["buffer", "overflow"],
            &[("buffer", ln_3_2), ("overflow", ln_3_2)],
        ),
        (
            &["buffer", "overflow", "attack"],
            &[("attack", ln_3), ("buffer", ln_3_2), ("overflow", ln_3_2)],
        ),
        (&["sql", "injection"], &[("injection", ln_3), ("sql", ln_3)]),
    ];
    for (tokens, weights) in expected {
        let v = embed(&doc(tokens), &vocab);
        assert_eq!(v.nnz(), weights.len());
        for &(term, want) in *weights {
            let idx = vocab.index_of(term).unwrap();
            let got = v
                .entries()
                .iter()
                .find(|(i, _)| *i == idx)
                .map(|(_, w)| *w)
                .unwrap();
            assert!((got - want).abs() <= 1e-9, "{term}: {got} vs {want}");
        }
    }
    pass(
        2,
        "micro-corpus TF-IDF weights match hand computation within 1e-9",
    );
}

#[test]
fn criterion_3_centroid_oracle() {
    let words = synth::synth_vocab("term", 30);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for round in 0..20 {
        let n_docs = rng.random_range(1..=50);
        let n_terms = rng.random_range(2..=30);
        let corpus: Vec<Vec<String>> = (0..n_docs)
            .map(|_| {
                (0..rng.random_range(1..=8))
                    .map(|_| words[rng.random_range(0..n_terms)].clone())
                    .collect()
            })
            .collect();
        let vocab = Vocabulary::fit(&corpus).unwrap();
        let vectors: Vec<SparseVector> = corpus.iter().map(|d| embed(d, &vocab)).collect();
        let threshold = [0.2, 0.5, 0.8][round % 3];
        let model = CentroidModel::fit(&vectors, threshold, vocab).unwrap();

        for v in &vectors {
            let (ref_score, ref_normal) =
                oracles::dense_centroid_verdict(v, model.centroid(), threshold);
            let got_score = model.novelty_score(v);
            let got_normal = model.classify(v) == Verdict::Normal;
            assert_eq!(got_score.to_bits(), ref_score.to_bits(), "score mismatch");
            assert_eq!(got_normal, ref_normal, "verdict mismatch");
        }
    }
    pass(
        3,
        "centroid classify agrees exactly with the dense reference on 20 corpora",
    );
}

/// Independent dense kernel over 2-d points.
fn dense_kernel(a: [f64; 2], b: [f64; 2], kernel: &KernelSpec) -> f64 {
    match kernel {
        KernelSpec::Linear => a[0] * b[0] + a[1] * b[1],
        KernelSpec::Rbf { gamma } => {
            let d0 = a[0] - b[0];
            let d1 = a[1] - b[1];
            (-gamma * (d0 * d0 + d1 * d1)).exp()
        }
    }
}

fn point_to_sparse(p: [f64; 2]) -> SparseVector {
    SparseVector::from_entries(
        p.iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(i, w)| (i, *w))
            .collect(),
    )
    .unwrap()
}

#[test]
fn criterion_4_ocsvm_qp_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31337);
    let kernels = [KernelSpec::Linear, KernelSpec::Rbf { gamma: 1.0 }];

    // Small problems against the enumeration oracle.
    for len in 2..=6usize {
        for &nu in &[0.3, 0.5, 0.9] {
            for kernel in &kernels {
                for _ in 0..2 {
                    let points: Vec<[f64; 2]> = (0..len)
                        .map(|_| {
                            [
                                rng.random_range(-1.0..1.0f64),
                                rng.random_range(-1.0..1.0f64),
                            ]
                        })
                        .collect();
                    let kmat: Vec<Vec<f64>> = points
                        .iter()
                        .map(|a| {
                            points
                                .iter()
                                .map(|b| dense_kernel(*a, *b, kernel))
                                .collect()
                        })
                        .collect();
                    let cap = 1.0 / (nu * len as f64);

                    let oracle = oracles::solve_qp_by_enumeration(&kmat, cap);
                    let cert = oracles::qp_kkt_residual(&kmat, &oracle.alphas, oracle.rho, cap);
                    assert!(cert <= 1e-8, "oracle certificate {cert}");

                    let vectors: Vec<SparseVector> =
                        points.iter().map(|p| point_to_sparse(*p)).collect();
                    let fit = ocsvm::train_ocsvm(&vectors, nu, kernel, 1e-7).unwrap();
                    assert!(fit.converged);

                    let solver_obj = oracles::qp_objective(&kmat, &fit.alphas);
                    assert!(
                        (solver_obj - oracle.objective).abs() <= 1e-4,
                        "objective {} vs oracle {} (l={len}, nu={nu}, {kernel:?})",
                        solver_obj,
                        oracle.objective
                    );

                    let residual = oracles::qp_kkt_residual(&kmat, &fit.alphas, fit.rho, cap);
                    assert!(residual <= 1e-6, "solver KKT residual {residual}");

                    // Decision values on the training points agree too.
                    for row in &kmat {
                        let g_solver: f64 = row.iter().zip(&fit.alphas).map(|(k, a)| k * a).sum();
                        let g_oracle: f64 =
                            row.iter().zip(&oracle.alphas).map(|(k, a)| k * a).sum();
                        let f_solver = g_solver - fit.rho;
                        let f_oracle = g_oracle - oracle.rho;
                        assert!(
                            (f_solver - f_oracle).abs() <= 1e-4,
                            "decision value {f_solver} vs {f_oracle}"
                        );
                    }
                }
            }
        }
    }

    // The nu-property on larger random datasets.
    let mut datasets = 0;
    while datasets < 20 {
        let len = rng.random_range(10..=50);
        let points: Vec<SparseVector> = (0..len)
            .map(|_| {
                let entries: Vec<(usize, f64)> = (0..4)
                    .filter_map(|i| {
                        let w: f64 = rng.random_range(-1.0..1.0);
                        (w != 0.0).then_some((i, w))
                    })
                    .collect();
                SparseVector::from_entries(entries).unwrap()
            })
            .collect();
        for &nu in &[0.3, 0.5, 0.9] {
            let kernel = KernelSpec::Rbf { gamma: 1.0 };
            let fit = ocsvm::train_ocsvm(&points, nu, &kernel, 1e-7).unwrap();
            let len_f = len as f64;
            let margin_errors = points
                .iter()
                .enumerate()
                .filter(|(i, _)| {
                    let g: f64 = points
                        .iter()
                        .zip(&fit.alphas)
                        .map(|(x, a)| a * ocsvm::kernel_eval(x, &points[*i], &kernel))
                        .sum();
                    g - fit.rho < -1e-6
                })
                .count();
            let svs = fit.alphas.iter().filter(|&&a| a > 0.0).count();
            assert!(
                margin_errors as f64 / len_f <= nu + 1e-12,
                "margin-error fraction {} exceeds nu {nu}",
                margin_errors as f64 / len_f
            );
            assert!(
                nu <= svs as f64 / len_f + 1.0 / len_f + 1e-12,
                "nu {nu} exceeds SV fraction {} + 1/l",
                svs as f64 / len_f
            );
        }
        datasets += 1;
    }
    pass(
        4,
        "solver matches the QP oracle (1e-4), KKT <= 1e-6, nu-property holds",
    );
}

#[test]
fn criterion_5_relevance_formulas() {
    // Vocabulary with N = 10 where "alpha" appears in 5 documents.
    let mut corpus: Vec<Vec<String>> = (0..10).map(|_| vec![]).collect();
    for doc in corpus.iter_mut().take(5) {
        doc.push("alpha".to_string());
    }
    for doc in corpus.iter_mut() {
        doc.push("common".to_string());
    }
    let vocab = Vocabulary::fit(&corpus).unwrap();
    assert_eq!(vocab.corpus_size(), 10);
    assert_eq!(vocab.doc_freq("alpha"), 5);

    let w = relevance::term_weight("alpha", &vocab);
    assert!((w - (11.0f64 / 6.0).ln()).abs() <= 1e-9, "weight {w}");
    assert_eq!(relevance::term_weight("never-seen", &vocab), 0.0);

    // Additivity over concatenation on 100 random pairs.
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let pool = ["alpha", "common", "missing", "ghost"];
    for _ in 0..100 {
        let draw = |rng: &mut ChaCha8Rng| -> Vec<String> {
            (0..rng.random_range(0..12))
                .map(|_| pool[rng.random_range(0..pool.len())].to_string())
                .collect()
        };
        let d1 = draw(&mut rng);
        let d2 = draw(&mut rng);
        let mut joined = d1.clone();
        joined.extend(d2.iter().cloned());
        let lhs = relevance::doc_weight(&joined, &vocab);
        let rhs = relevance::doc_weight(&d1, &vocab) + relevance::doc_weight(&d2, &vocab);
        assert!((lhs - rhs).abs() <= 1e-9, "{lhs} vs {rhs}");
    }

    // top_k against a full-sort oracle.
    let docs: Vec<Document> = (0..100)
        .map(|i| {
            let text: Vec<&str> = (0..rng.random_range(0..8))
                .map(|_| pool[rng.random_range(0..pool.len())])
                .collect();
            Document::new(format!("d{i:03}"), text.join(" "))
        })
        .collect();
    let got = relevance::top_k(&docs, sw(), &vocab, 10);
    let mut oracle: Vec<(String, f64)> = docs
        .iter()
        .map(|d| {
            (
                d.id.clone(),
                relevance::doc_weight(&normalize(&d.text, sw()), &vocab),
            )
        })
        .collect();
    oracle.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    for (ranked, (oracle_id, oracle_w)) in got.iter().zip(&oracle) {
        assert_eq!(&ranked.id, oracle_id);
        assert_eq!(ranked.relevance_weight, *oracle_w);
    }
    pass(
        5,
        "term/document relevance weights, additivity and top-k sort oracle",
    );
}

#[test]
fn criterion_6_linker_planted_match() {
    // 20 synthetic entries: shared filler plus 3 rare terms unique per entry.
    let rare = synth::synth_vocab("rare", 60);
    let entries: Vec<CveEntry> = (0..20)
        .map(|i| CveEntry {
            cve_id: format!("CVE-2018-{:04}", 1000 + i),
            description: format!(
                "component failure allows {} {} {} in handler",
                rare[3 * i],
                rare[3 * i + 1],
                rare[3 * i + 2]
            ),
            published: chrono::NaiveDate::from_ymd_opt(2018, 1, 1 + i as u32).unwrap(),
        })
        .collect();
    let index = linker::build_link_index(&entries, sw()).unwrap();

    for entry in &entries {
        // Verbatim-duplicate query: its own entry at rank 1, similarity 1.
        let query_doc = Document::new("q", entry.description.clone());
        let got = linker::link(&query_doc, &index, 10, sw());
        assert_eq!(got.matches[0].cve_id, entry.cve_id);
        assert!(
            got.matches[0].score >= 1.0 - 1e-12,
            "similarity {}",
            got.matches[0].score
        );

        // Full top-10 agrees with the exhaustive scan.
        let query_vec = embed(&normalize(&entry.description, sw()), index.vocab());
        let entry_vecs: Vec<(String, SparseVector)> = entries
            .iter()
            .map(|e| {
                (
                    e.cve_id.clone(),
                    embed(&normalize(&e.description, sw()), index.vocab()),
                )
            })
            .collect();
        let oracle =
            oracles::exhaustive_link_scan(&query_vec, &entry_vecs, index.vocab().len(), 10);
        assert_eq!(got.matches.len(), oracle.len());
        for (m, (oracle_id, oracle_score)) in got.matches.iter().zip(&oracle) {
            assert_eq!(&m.cve_id, oracle_id);
            assert!((m.score - oracle_score).abs() <= 1e-12);
        }
    }

    // A query sharing only the 3 rare terms of one entry ranks that entry first.
    for (i, entry) in entries.iter().enumerate() {
        let query = Document::new(
            "q",
            format!(
                "urgent report mentioning {} {} {}",
                rare[3 * i],
                rare[3 * i + 1],
                rare[3 * i + 2]
            ),
        );
        let got = linker::link(&query, &index, 10, sw());
        assert_eq!(got.matches[0].cve_id, entry.cve_id, "rare-term query {i}");
    }
    pass(
        6,
        "verbatim queries hit rank 1 at similarity 1.0; top-10 matches the scan",
    );
}

#[test]
fn criterion_7_end_to_end_separability() {
    let threat = synth::synth_vocab("vuln", 50);
    let benign = synth::synth_vocab("daily", 50);
    let mut rng = synth::rng_for_seed(777);

    let train_docs = synth::synth_docs(&mut rng, &threat, 100, "train", Label::Positive);
    let dev_pos = synth::synth_docs(&mut rng, &threat, 100, "devp", Label::Positive);
    let dev_neg = synth::synth_docs(&mut rng, &benign, 100, "devn", Label::Negative);
    let test_pos = synth::synth_docs(&mut rng, &threat, 100, "tstp", Label::Positive);
    let test_neg = synth::synth_docs(&mut rng, &benign, 100, "tstn", Label::Negative);

    let tokenized: Vec<Vec<String>> = train_docs
        .iter()
        .map(|d| normalize(&d.text, sw()))
        .collect();
    let vocab = Vocabulary::fit(&tokenized).unwrap();
    let vectors: Vec<SparseVector> = tokenized.iter().map(|t| embed(t, &vocab)).collect();
    let model = CentroidModel::fit(&vectors, 0.5, vocab).unwrap();

    let score =
        |doc: &Document| model.novelty_score(&embed(&normalize(&doc.text, sw()), model.vocab()));

    let dev: Vec<(Label, f64)> = dev_pos
        .iter()
        .chain(&dev_neg)
        .map(|d| (d.label.unwrap(), score(d)))
        .collect();
    let curve = eval::sweep(&dev).unwrap();
    let tau = eval::pick_threshold(&curve);

    let mut confusion = Confusion::default();
    for doc in test_pos.iter().chain(&test_neg) {
        let normal = score(doc) <= tau;
        match (doc.label.unwrap(), normal) {
            (Label::Positive, true) => confusion.true_pos += 1,
            (Label::Negative, true) => confusion.false_pos += 1,
            (Label::Positive, false) => confusion.false_neg += 1,
            (Label::Negative, false) => confusion.true_neg += 1,
        }
    }
    let m = eval::metrics(&confusion);
    assert!(m.f1 >= 0.95, "held-out F1 {} below 0.95", m.f1);
    pass(
        7,
        &format!(
            "held-out F1 {:.3} >= 0.95 at swept threshold {tau:.3}",
            m.f1
        ),
    );
}

#[test]
fn criterion_8_cve_id_baseline() {
    // Grammar vectors.
    assert_eq!(
        eval::extract_cve_ids("patched (CVE-2018-0101) today"),
        vec!["CVE-2018-0101"]
    );
    assert_eq!(
        eval::extract_cve_ids("cve-2017-11882 is actively exploited"),
        vec!["CVE-2017-11882"]
    );
    assert!(eval::extract_cve_ids("CVE-18-1 is not a real id").is_empty());
    assert!(eval::extract_cve_ids("CVE-2018-1 too short").is_empty());
    assert_eq!(
        eval::extract_cve_ids("both CVE-2015-1234567 and CVE-2015-1234567 once"),
        vec!["CVE-2015-1234567"]
    );

    // Reconstructed corpus: 61 documents carry an id (53 positive, 8
    // negative); 179 more positives and 2760 more negatives carry none,
    // reproducing 232 positives in a 3000-document testing set.
    let mut docs = Vec::new();
    let mut serial = 0;
    let mut with_id = |label| {
        serial += 1;
        Document::new(
            format!("id{serial:05}"),
            format!("mentions CVE-2018-{:04}", serial),
        )
        .with_label(label)
    };
    for _ in 0..53 {
        docs.push(with_id(Label::Positive));
    }
    for _ in 0..8 {
        docs.push(with_id(Label::Negative));
    }
    for i in 0..179 {
        docs.push(
            Document::new(format!("plainp{i:04}"), "new threat discussed")
                .with_label(Label::Positive),
        );
    }
    for i in 0..2760 {
        docs.push(
            Document::new(format!("plainn{i:04}"), "weekend plans").with_label(Label::Negative),
        );
    }
    assert_eq!(docs.len(), 3000);

    let confusion = eval::cve_baseline(&docs).unwrap();
    assert_eq!(
        (confusion.true_pos, confusion.false_pos, confusion.false_neg),
        (53, 8, 179)
    );
    let m = eval::metrics(&confusion);
    assert!((m.precision - 0.869).abs() <= 1e-3);
    assert!((m.recall - 0.228).abs() <= 1e-3);
    assert!((m.f1 - 0.361).abs() <= 1e-3);
    pass(
        8,
        "CVE-id grammar vectors and the 53/8/179 baseline reproduction",
    );
}

fn run_pipeline(dir: &Path) {
    let bin = env!("CARGO_BIN_EXE_threatsift");
    let run = |args: &[&str]| {
        let output = Command::new(bin)
            .current_dir(dir)
            .args(args)
            .output()
            .expect("binary runs");
        assert!(
            output.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    };
    run(&[
        "synth",
        "--seed",
        "7",
        "--positives",
        "40",
        "--negatives",
        "40",
        "--cve-count",
        "60",
        "--year",
        "2017",
        "--out-docs",
        "docs.jsonl",
        "--out-feed",
        "feed.jsonl",
    ]);
    run(&[
        "train",
        "--feed",
        "feed.jsonl",
        "--model",
        "centroid",
        "--threshold",
        "0.8",
        "--from",
        "2017-01-01",
        "--to",
        "2017-12-31",
        "--output",
        "centroid.json",
    ]);
    run(&[
        "train",
        "--feed",
        "feed.jsonl",
        "--model",
        "ocsvm",
        "--nu",
        "0.5",
        "--kernel",
        "rbf",
        "--gamma",
        "1.0",
        "--tol",
        "1e-6",
        "--output",
        "ocsvm.json",
    ]);
    run(&[
        "classify",
        "--model",
        "centroid.json",
        "--input",
        "docs.jsonl",
        "--output",
        "results.jsonl",
    ]);
    run(&[
        "rank",
        "--model",
        "centroid.json",
        "--input",
        "docs.jsonl",
        "--k",
        "20",
        "--output",
        "ranked.jsonl",
    ]);
    run(&[
        "link",
        "--feed",
        "feed.jsonl",
        "--input",
        "docs.jsonl",
        "--k",
        "5",
        "--output",
        "links.jsonl",
    ]);
    run(&[
        "eval",
        "--input",
        "docs.jsonl",
        "--results",
        "results.jsonl",
        "--output",
        "report.json",
    ]);
    run(&[
        "sweep",
        "--model",
        "centroid.json",
        "--input",
        "docs.jsonl",
        "--output",
        "curve.csv",
    ]);
}

#[test]
fn criterion_9_cli_determinism() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    run_pipeline(dir_a.path());
    run_pipeline(dir_b.path());

    let files = [
        "feed.jsonl",
        "docs.jsonl",
        "centroid.json",
        "ocsvm.json",
        "results.jsonl",
        "ranked.jsonl",
        "links.jsonl",
        "report.json",
        "curve.csv",
    ];
    for name in files {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
        assert!(!a.is_empty(), "{name} is empty");
    }
    pass(
        9,
        "two identical pipeline runs are byte-identical across 9 artifacts",
    );
}
