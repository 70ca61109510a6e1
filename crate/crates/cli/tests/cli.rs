use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use structag::corpus::{load_corpus, Format};
use structag::source::Registry;
use structag::treebank::{parse_sentence, validate_tree};
use structag::vocab::Vocabulary;

fn structag(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_structag"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = structag(args, dir);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new(sentences: usize) -> Self {
        let dir = tempfile::tempdir().unwrap();
        ok(&["synth", "--sentences", &sentences.to_string(), "--seed", "4", "-o", "gold.brk"], dir.path());
        let inputs = "der/ART.nom.sgm Mann/NN.nom.sgm sieht/VVFIN\n\
                      APPR ART.dat.sgf ADJA.dat.sgf NN.dat.sgf\n\
                      ART.acc.sgn NN.acc.sgn APPR ART.dat.pl NN.dat.pl VVFIN $.\n";
        std::fs::write(dir.path().join("in.txt"), inputs).unwrap();
        Workspace { dir }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn file(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn train(&self, source: &str, out: &str) -> String {
        ok(
            &["train", "--corpus", "gold.brk", "--open-vocab", "--source", source, "-o", out],
            self.path(),
        )
    }
}

#[test]
fn trained_model_reloads_identically_and_records_iterations() {
    let ws = Workspace::new(120);
    let log = ws.train("maxent", "m.txt");
    assert!(log.lines().any(|l| l.starts_with("features: ")));
    let ll: Vec<_> = log.lines().filter(|l| l.contains("log-likelihood")).collect();
    assert_eq!(ll.len(), 4, "{log}");
    let text = std::fs::read_to_string(ws.file("m.txt")).unwrap();
    let model = Registry::standard().load_text(&text).unwrap();
    assert_eq!(model.to_text(), text);
    assert_eq!(model.info().iterations, Some(3));
}

#[test]
fn high_cutoff_warns_and_writes_a_uniform_model() {
    let ws = Workspace::new(60);
    let out = structag(
        &["train", "--corpus", "gold.brk", "--open-vocab", "--cutoff", "1000000", "-o", "u.txt"],
        ws.path(),
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("features: 0"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let model = Registry::standard().load(&ws.file("u.txt")).unwrap();
    let inv = model.futures();
    let h = structag::source::History::Boundary;
    let p = model.log_probs(h, h);
    assert!(p.iter().all(|&x| (x - p[0]).abs() < 1e-12), "not uniform over {} futures", inv.len());
}

#[test]
fn errors_exit_nonzero_with_a_message() {
    let ws = Workspace::new(20);
    for args in [
        &["train", "--corpus", "gold.brk", "--open-vocab", "--iterations", "0", "-o", "x.txt"][..],
        &["train", "--corpus", "missing.brk", "-o", "x.txt"],
        &["train", "--corpus", "gold.brk", "-o", "x.txt"],
        &["parse", "--model", "missing.txt", "-i", "in.txt"],
        &["train", "--corpus", "gold.brk", "--open-vocab", "--source", "hmm", "-o", "x.txt"],
    ] {
        let out = structag(args, ws.path());
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"), "{args:?}");
    }
    assert!(!ws.file("x.txt").exists());
}

#[test]
fn parse_output_is_valid_and_deterministic() {
    let ws = Workspace::new(150);
    ws.train("maxent", "m.txt");
    let first = ok(&["parse", "--model", "m.txt", "-i", "in.txt"], ws.path());
    let second = ok(&["parse", "--model", "m.txt", "-i", "in.txt"], ws.path());
    assert_eq!(first, second);
    assert_eq!(first.lines().count(), 3);
    for line in first.lines() {
        let tree = parse_sentence(line).unwrap();
        assert!(validate_tree(&tree).is_empty(), "{line}");
    }
    let tags = ok(&["parse", "--model", "m.txt", "-i", "in.txt", "--output", "tags"], ws.path());
    assert_eq!(structag::corpus::parse_columnar(&tags).unwrap().len(), 3);
}

#[test]
fn both_sources_decode_the_same_input() {
    let ws = Workspace::new(150);
    ws.train("maxent", "me.txt");
    let log = ws.train("interpolation", "ip.txt");
    assert!(log.contains("lambdas: "));
    let a = ok(&["parse", "--model", "me.txt", "-i", "in.txt"], ws.path());
    let b = ok(&["parse", "--model", "ip.txt", "-i", "in.txt"], ws.path());
    for out in [&a, &b] {
        assert_eq!(out.lines().count(), 3);
        for line in out.lines() {
            assert!(validate_tree(&parse_sentence(line).unwrap()).is_empty());
        }
    }
}

#[test]
fn chunk_prints_flat_chunks() {
    let ws = Workspace::new(150);
    ws.train("maxent", "m.txt");
    let out = ok(&["chunk", "--model", "m.txt", "-i", "in.txt", "--flat"], ws.path());
    let first = out.lines().next().unwrap();
    assert_eq!(first, "[NP der/ART.nom.sgm Mann/NN.nom.sgm] sieht/VVFIN");
}

#[test]
fn gold_against_itself_is_perfect() {
    let ws = Workspace::new(40);
    let out = ok(
        &["evaluate", "--gold", "gold.brk", "--pred", "gold.brk", "--open-vocab", "--mode", "chunking", "--key-values"],
        ws.path(),
    );
    let recalls: Vec<_> = out.lines().filter(|l| l.contains(".recall=") || l.contains(".precision=")).collect();
    assert_eq!(recalls.len(), 10, "{out}");
    assert!(recalls.iter().all(|l| l.ends_with("=1")), "{out}");
    let rows: Vec<_> = out.lines().filter(|l| l.contains('%')).collect();
    assert_eq!(rows.len(), 5);
    let full: Vec<usize> = rows.iter().map(|r| r.matches("100.0%").count()).collect();
    assert_eq!(full, [1, 2, 2, 2, 2], "{out}");
}

#[test]
fn crossval_prints_every_fold_and_a_curve() {
    let ws = Workspace::new(200);
    let out = ok(
        &[
            "crossval", "--corpus", "gold.brk", "--open-vocab", "--source", "interpolation", "--seed", "11", "--curve",
            "50,100,150", "--curve-out", "curve",
        ],
        ws.path(),
    );
    let header = out.lines().next().unwrap();
    assert!(header.contains("seed=11") && header.contains("folds=10"), "{header}");
    assert_eq!(out.matches("## fold ").count(), 10);
    assert_eq!(out.matches("## average over 10 folds").count(), 1);
    let curve = std::fs::read_to_string(ws.file("curve/tags.dat")).unwrap();
    let sizes: Vec<&str> = curve
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').next().unwrap())
        .collect();
    assert_eq!(sizes, ["50", "100", "150"]);
    assert!(curve.contains("seed=11"));

    let again = ok(
        &[
            "crossval", "--corpus", "gold.brk", "--open-vocab", "--source", "interpolation", "--seed", "11", "--curve",
            "50,100,150",
        ],
        ws.path(),
    );
    assert_eq!(out, again);
}

#[test]
fn flags_override_the_config_file() {
    let ws = Workspace::new(60);
    std::fs::write(ws.file("run.toml"), "iterations = 2\nopen_vocab = true\n").unwrap();
    let count = |s: &str| s.lines().filter(|l| l.contains("log-likelihood")).count();
    let from_file = ok(&["--config", "run.toml", "train", "--corpus", "gold.brk", "-o", "a.txt"], ws.path());
    assert_eq!(count(&from_file), 3);
    let flagged = ok(
        &["--config", "run.toml", "train", "--corpus", "gold.brk", "--iterations", "1", "-o", "b.txt"],
        ws.path(),
    );
    assert_eq!(count(&flagged), 2);
    std::fs::write(ws.file("bad.toml"), "iterashuns = 2\n").unwrap();
    assert!(!structag(&["--config", "bad.toml", "train", "--corpus", "gold.brk", "-o", "c.txt"], ws.path())
        .status
        .success());
}

#[test]
fn extracted_chunks_load_as_columnar() {
    let ws = Workspace::new(50);
    let out = ok(
        &["extract-chunks", "--corpus", "gold.brk", "--open-vocab", "--categories", "NP,PP", "-o", "chunks.tsv"],
        ws.path(),
    );
    let chunks = load_corpus(&ws.file("chunks.tsv"), Format::Columnar, &Vocabulary::permissive()).unwrap();
    assert!(out.starts_with(&format!("{} chunks from 50 sentences", chunks.len())));
    for c in &chunks.sentences {
        assert_eq!(c.top.len(), 1);
        let structag::treebank::Child::Node(n) = c.top[0] else { panic!("bare token chunk") };
        assert!(["NP", "PP"].contains(&c.nodes[n].label.to_string().as_str()));
    }
}
