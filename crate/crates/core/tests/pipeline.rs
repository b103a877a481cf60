use std::path::{Path, PathBuf};

use ontoforge::cluster::DistanceMatrix;
use ontoforge::ontology::import_json;
use ontoforge::pipeline::{sha256_hex, Phase, PhaseStatus, Pipeline, PipelineConfig};
use ontoforge::termhood::{Measure, RankedTermList};
use ontoforge::Error;

fn mini() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mini")
}

fn config(out: &Path) -> PipelineConfig {
    let mut c = PipelineConfig::from_file(&mini().join("config.json")).unwrap();
    c.out_dir = out.to_path_buf();
    c
}

fn read(p: &Pipeline, name: &str) -> String {
    std::fs::read_to_string(p.out(name)).unwrap()
}

#[test]
fn manifest_digests_match_written_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = Pipeline::new(config(dir.path())).unwrap();
    p.run_all().unwrap();
    let manifest = p.load_manifest().unwrap().unwrap();
    assert_eq!(manifest.phases.len(), Phase::ALL.len());
    for rec in &manifest.phases {
        for o in &rec.outputs {
            assert_eq!(o.sha256, sha256_hex(read(&p, &o.path).as_bytes()), "{}", o.path);
        }
    }
    // Each phase reads what an earlier phase wrote, byte for byte.
    let frames = manifest.record(Phase::Frames).unwrap();
    let cleaned = manifest.record(Phase::Clean).unwrap();
    assert_eq!(frames.inputs[0].path, "cleaned.json");
    assert_eq!(frames.inputs[0].sha256, cleaned.outputs[0].sha256);
}

#[test]
fn cluster_uses_top_n_of_the_selected_measure() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path());
    c.measure = Measure::Ot;
    c.top_n = 12;
    let p = Pipeline::new(c).unwrap();
    p.run_all().unwrap();
    let ranked = RankedTermList::from_tsv(Measure::Ot, &read(&p, "terms_ot.tsv"), "terms_ot.tsv").unwrap();
    let matrix = DistanceMatrix::from_tsv(&read(&p, "distances.tsv"), "distances.tsv").unwrap();
    let mut want: Vec<String> = ranked.entries.iter().take(12).map(|e| e.term.clone()).collect();
    want.sort();
    let mut got = matrix.terms().to_vec();
    got.sort();
    assert_eq!(got, want);
    let graph = import_json(&read(&p, "ontology.json"), "ontology.json").unwrap();
    assert_eq!(graph.terms.len(), 12);
    graph.validate().unwrap();
}

#[test]
fn sample_frames_caps_the_frame_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path());
    c.sample_frames = Some(25);
    let p = Pipeline::new(c).unwrap();
    for phase in [Phase::Ingest, Phase::Clean, Phase::Frames] {
        p.run_phase(phase).unwrap();
    }
    assert_eq!(read(&p, "frames.jsonl").lines().count(), 25);
}

#[test]
fn optional_phases_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path());
    c.cleaning.enabled = false;
    c.benchmark_path = None;
    let p = Pipeline::new(c).unwrap();
    let records = p.run_all().unwrap();
    let status = |phase| records.iter().find(|r| r.phase == phase).unwrap().status;
    assert_eq!(status(Phase::Clean), PhaseStatus::Skipped);
    assert_eq!(status(Phase::Eval), PhaseStatus::Skipped);
    assert!(!p.out("cleaned.json").exists());
    assert!(!p.out("eval_report.json").exists());
    let frames = records.iter().find(|r| r.phase == Phase::Frames).unwrap();
    assert_eq!(frames.inputs[0].path, "ingest.json");
}

#[test]
fn later_phase_without_its_inputs_fails() {
    let dir = tempfile::tempdir().unwrap();
    let p = Pipeline::new(config(dir.path())).unwrap();
    match p.run_phase(Phase::Ontology) {
        Err(Error::Dependency { file, .. }) => assert_eq!(file, "cluster_tree.json"),
        other => panic!("expected a dependency error, got {other:?}"),
    }
}

#[test]
fn seed_is_recorded_and_runs_repeat() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let mut c = config(dir.path());
        c.seed = 99;
        Pipeline::new(c).unwrap().run_all().unwrap();
    }
    let tree = |d: &tempfile::TempDir| std::fs::read(d.path().join("cluster_tree.json")).unwrap();
    assert_eq!(tree(&a), tree(&b));
    let p = Pipeline::new(config(a.path())).unwrap();
    assert_eq!(p.load_manifest().unwrap().unwrap().config.seed, 99);
}
