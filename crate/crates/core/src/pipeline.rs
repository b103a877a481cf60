//! Phase orchestration with file-based handoff. Every phase reads its
//! inputs from and writes its artifacts to the output directory, and
//! records digests in `manifest.json`.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cleaning::{clean_document, AbbreviationDictionary, CleaningModel, CleaningReport, CleaningWeights, Lexicon};
use crate::cluster::{build_distance_matrix, tta_cluster, ClusterNode, ClusterParams, DistanceMatrix, HitCountProvider};
use crate::corpus::{
    build_frequency_index, ingest_directory, load_hit_count_snapshot, tokenize_documents, CorpusTag, Document,
    HitCountSnapshot, Ingested, PhraseIndex, SourceKind,
};
use crate::error::{Error, Result};
use crate::eval::{
    frequency_distribution_report, judge_top_n, load_judgments, precision, BenchmarkConceptSet, DiscoveredConcept,
    EvalReport,
};
use crate::frames::{process_corpus, read_jsonl, sample_frames, write_jsonl, ChunkParams};
use crate::ontology::{assemble_ontology, export_dot, export_json, export_turtle, import_json};
use crate::termhood::{rank_terms, select_top_n, Measure, RankedTermList, TermInputs, TermParams};

pub const INGEST: &str = "ingest.json";
pub const CLEANED: &str = "cleaned.json";
pub const CLEANING_REPORT: &str = "cleaning_report.jsonl";
pub const FRAMES: &str = "frames.jsonl";
pub const MERGE_DECISIONS: &str = "merge_decisions.jsonl";
pub const DISTANCES: &str = "distances.tsv";
pub const CLUSTER_TREE: &str = "cluster_tree.json";
pub const ONTOLOGY_JSON: &str = "ontology.json";
pub const ONTOLOGY_DOT: &str = "ontology.dot";
pub const ONTOLOGY_TTL: &str = "ontology.ttl";
pub const EVAL_REPORT: &str = "eval_report.json";
pub const FREQUENCY_CSV: &str = "frequency_distribution.csv";
pub const MANIFEST: &str = "manifest.json";
pub const OUT_ENV: &str = "ONTOFORGE_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Ingest,
    Clean,
    Frames,
    Terms,
    Cluster,
    Ontology,
    Eval,
}

impl Phase {
    pub const ALL: [Phase; 7] = [
        Phase::Ingest,
        Phase::Clean,
        Phase::Frames,
        Phase::Terms,
        Phase::Cluster,
        Phase::Ontology,
        Phase::Eval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Phase::Ingest => "ingest",
            Phase::Clean => "clean",
            Phase::Frames => "frames",
            Phase::Terms => "terms",
            Phase::Cluster => "cluster",
            Phase::Ontology => "ontology",
            Phase::Eval => "eval",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Phase::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown phase `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CleaningConfig {
    pub enabled: bool,
    pub threshold: f64,
    pub weights: CleaningWeights,
    pub lexicon_min_count: u64,
    pub max_edit: usize,
}

impl Default for CleaningConfig {
    fn default() -> Self {
        CleaningConfig {
            enabled: false,
            threshold: 0.5,
            weights: CleaningWeights::default(),
            lexicon_min_count: 2,
            max_edit: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterConfig {
    pub max_leaf: usize,
    pub theta_split: f64,
    pub theta_out: f64,
    pub passes: usize,
    /// Reuse `distances.tsv` when it covers exactly the selected terms.
    pub reuse_distances: bool,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        let p = ClusterParams::default();
        ClusterConfig {
            max_leaf: p.max_leaf,
            theta_split: p.theta_split,
            theta_out: p.theta_out,
            passes: p.passes,
            reuse_distances: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub domain_dir: PathBuf,
    pub contrastive_dir: PathBuf,
    #[serde(default)]
    pub abbrev_path: Option<PathBuf>,
    /// Extra known words for cleaning, one per line.
    #[serde(default)]
    pub wordlist_path: Option<PathBuf>,
    #[serde(default)]
    pub snapshot_path: Option<PathBuf>,
    #[serde(default)]
    pub benchmark_path: Option<PathBuf>,
    /// `term<TAB>0|1` relevance judgments for precision at n.
    #[serde(default)]
    pub judgments_path: Option<PathBuf>,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default)]
    pub sample_frames: Option<usize>,
    #[serde(default = "default_top_n")]
    pub top_n: usize,
    #[serde(default = "default_measure")]
    pub measure: Measure,
    #[serde(default)]
    pub cluster: ClusterConfig,
    #[serde(default)]
    pub chunking: ChunkParams,
    #[serde(default)]
    pub termhood: TermParams,
    #[serde(default)]
    pub cleaning: CleaningConfig,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
}

fn default_window() -> usize {
    crate::corpus::DEFAULT_WINDOW
}

fn default_top_n() -> usize {
    36
}

fn default_measure() -> Measure {
    Measure::Th
}

fn default_tau() -> f64 {
    0.5
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub measure: Option<Measure>,
    pub top_n: Option<usize>,
    pub sample_frames: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

impl PipelineConfig {
    /// Parses the file and resolves relative paths against its directory.
    /// The result is not validated yet.
    pub fn from_file(path: &Path) -> Result<PipelineConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: PipelineConfig =
            serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.domain_dir);
        fix(&mut self.contrastive_dir);
        fix(&mut self.out_dir);
        for p in [
            &mut self.abbrev_path,
            &mut self.wordlist_path,
            &mut self.snapshot_path,
            &mut self.benchmark_path,
            &mut self.judgments_path,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }

    /// Flag beats `ONTOFORGE_OUT`, which beats the file.
    pub fn apply(&mut self, o: &Overrides, env_out: Option<PathBuf>) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(m) = o.measure {
            self.measure = m;
        }
        if let Some(n) = o.top_n {
            self.top_n = n;
        }
        if let Some(k) = o.sample_frames {
            self.sample_frames = Some(k);
        }
        if let Some(p) = o.out_dir.clone().or(env_out) {
            self.out_dir = p;
        }
    }

    pub fn cluster_params(&self) -> ClusterParams {
        ClusterParams {
            max_leaf: self.cluster.max_leaf,
            theta_split: self.cluster.theta_split,
            theta_out: self.cluster.theta_out,
            passes: self.cluster.passes,
            seed: self.seed,
        }
    }

    /// Lists every offending field.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        for (name, dir) in [("domain_dir", &self.domain_dir), ("contrastive_dir", &self.contrastive_dir)] {
            if !dir.is_dir() {
                problems.push(format!("{name}: {} is not a directory", dir.display()));
            }
        }
        for (name, p) in [
            ("abbrev_path", &self.abbrev_path),
            ("wordlist_path", &self.wordlist_path),
            ("snapshot_path", &self.snapshot_path),
            ("benchmark_path", &self.benchmark_path),
            ("judgments_path", &self.judgments_path),
        ] {
            if let Some(p) = p {
                if !p.is_file() {
                    problems.push(format!("{name}: {} does not exist", p.display()));
                }
            }
        }
        if self.window == 0 {
            problems.push("window: must be at least 1".into());
        }
        if self.top_n == 0 {
            problems.push("top_n: must be at least 1".into());
        }
        if self.sample_frames == Some(0) {
            problems.push("sample_frames: must be at least 1".into());
        }
        if let Err(e) = self.cluster_params().validate() {
            problems.push(format!("cluster: {e}"));
        }
        if !(0.0..=1.0).contains(&self.tau) || self.tau == 0.0 {
            problems.push("tau: must be in (0, 1]".into());
        }
        if !(0.0..=1.0).contains(&self.cleaning.threshold) {
            problems.push("cleaning.threshold: must be in [0, 1]".into());
        }
        if self.chunking.min_unit_freq == 0 {
            problems.push("chunking.min_unit_freq: must be at least 1".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseStatus {
    Ok,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub phase: Phase,
    pub status: PhaseStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub millis: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: PipelineConfig,
    pub phases: Vec<PhaseRecord>,
}

impl RunManifest {
    pub fn record(&self, phase: Phase) -> Option<&PhaseRecord> {
        self.phases.iter().find(|r| r.phase == phase)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Corpora {
    pub domain: Ingested,
    pub contrastive: Ingested,
}

pub struct Pipeline {
    pub config: PipelineConfig,
}

struct Run {
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
    status: PhaseStatus,
    note: Option<String>,
}

impl Run {
    fn new() -> Run {
        Run {
            inputs: Vec::new(),
            outputs: Vec::new(),
            status: PhaseStatus::Ok,
            note: None,
        }
    }

    fn skipped(note: impl Into<String>) -> Run {
        Run {
            status: PhaseStatus::Skipped,
            note: Some(note.into()),
            ..Run::new()
        }
    }
}

impl Pipeline {
    /// Validates `config` and creates the output directory.
    pub fn new(config: PipelineConfig) -> Result<Pipeline> {
        config.validate()?;
        fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;
        Ok(Pipeline { config })
    }

    pub fn out(&self, name: &str) -> PathBuf {
        self.config.out_dir.join(name)
    }

    fn need(&self, phase: Phase, name: &str) -> Result<PathBuf> {
        let p = self.out(name);
        if p.is_file() {
            Ok(p)
        } else {
            Err(Error::Dependency {
                phase: phase.to_string(),
                file: name.to_string(),
            })
        }
    }

    fn read(&self, phase: Phase, name: &str, run: &mut Run) -> Result<String> {
        let p = self.need(phase, name)?;
        let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
        run.inputs.push(FileDigest {
            path: name.to_string(),
            sha256: sha256_hex(text.as_bytes()),
        });
        Ok(text)
    }

    fn read_external(path: &Path, run: &mut Run) -> Result<String> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        run.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(text.as_bytes()),
        });
        Ok(text)
    }

    fn write(&self, name: &str, content: &str, run: &mut Run) -> Result<()> {
        let p = self.out(name);
        fs::write(&p, content).map_err(|e| Error::io(&p, e))?;
        run.outputs.push(FileDigest {
            path: name.to_string(),
            sha256: sha256_hex(content.as_bytes()),
        });
        Ok(())
    }

    pub fn load_manifest(&self) -> Result<Option<RunManifest>> {
        let p = self.out(MANIFEST);
        if !p.is_file() {
            return Ok(None);
        }
        let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| Error::json(p.display().to_string(), e))
    }

    fn update_manifest(&self, rec: PhaseRecord) -> Result<()> {
        let mut m = self.load_manifest()?.unwrap_or_else(|| RunManifest {
            tool: "ontoforge".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: self.config.clone(),
            phases: Vec::new(),
        });
        m.config = self.config.clone();
        m.phases.retain(|r| r.phase != rec.phase);
        m.phases.push(rec);
        m.phases.sort_by_key(|r| r.phase);
        let mut text = serde_json::to_string_pretty(&m).expect("manifest serializes");
        text.push('\n');
        let p = self.out(MANIFEST);
        fs::write(&p, text).map_err(|e| Error::io(&p, e))
    }

    /// Runs one phase and records it in the manifest.
    pub fn run_phase(&self, phase: Phase) -> Result<PhaseRecord> {
        let start = Instant::now();
        log::info!("phase {phase} starting");
        let run = match phase {
            Phase::Ingest => self.ingest(),
            Phase::Clean => self.clean(),
            Phase::Frames => self.frames(),
            Phase::Terms => self.terms(),
            Phase::Cluster => self.cluster(),
            Phase::Ontology => self.ontology(),
            Phase::Eval => self.eval(),
        }?;
        let rec = PhaseRecord {
            phase,
            status: run.status,
            note: run.note,
            inputs: run.inputs,
            outputs: run.outputs,
            millis: start.elapsed().as_millis(),
        };
        log::info!("phase {phase} {:?} in {} ms", rec.status, rec.millis);
        self.update_manifest(rec.clone())?;
        Ok(rec)
    }

    /// Every phase in order; the first failure aborts.
    pub fn run_all(&self) -> Result<Vec<PhaseRecord>> {
        Phase::ALL.iter().map(|&p| self.run_phase(p)).collect()
    }

    fn ingest(&self) -> Result<Run> {
        let mut run = Run::new();
        let corpora = Corpora {
            domain: ingest_directory(&self.config.domain_dir, CorpusTag::Domain)?,
            contrastive: ingest_directory(&self.config.contrastive_dir, CorpusTag::Contrastive)?,
        };
        for s in corpora.domain.skipped.iter().chain(&corpora.contrastive.skipped) {
            log::warn!("skipped {}: {}", s.path.display(), s.reason);
        }
        let text = serde_json::to_string(&corpora).expect("corpora serialize");
        self.write(INGEST, &text, &mut run)?;
        Ok(run)
    }

    /// Ingested corpora, with cleaned domain documents when cleaning is on.
    fn load_corpora(&self, phase: Phase, run: &mut Run) -> Result<Corpora> {
        let name = if self.config.cleaning.enabled && phase != Phase::Clean {
            let cleaned = self.out(CLEANED);
            if cleaned.is_file() {
                CLEANED
            } else {
                INGEST
            }
        } else {
            INGEST
        };
        let text = self.read(phase, name, run)?;
        serde_json::from_str(&text).map_err(|e| Error::json(name, e))
    }

    fn clean(&self) -> Result<Run> {
        if !self.config.cleaning.enabled {
            return Ok(Run::skipped("cleaning disabled"));
        }
        let mut run = Run::new();
        let mut corpora = self.load_corpora(Phase::Clean, &mut run)?;
        if !corpora.domain.documents.iter().any(|d| d.source_kind == SourceKind::Plain) {
            return Ok(Run::skipped("no plain-text domain documents"));
        }
        let abbrevs = match &self.config.abbrev_path {
            Some(p) => AbbreviationDictionary::from_tsv(&Self::read_external(p, &mut run)?, &p.display().to_string())?,
            None => AbbreviationDictionary::default(),
        };
        let c = &self.config.cleaning;
        let domain = &corpora.domain.documents;
        let extra: Vec<String> = match &self.config.wordlist_path {
            Some(p) => Self::read_external(p, &mut run)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(String::from)
                .collect(),
            None => Vec::new(),
        };
        // General vocabulary comes from the contrastive corpus as well.
        let mut vocabulary = domain.clone();
        vocabulary.extend(corpora.contrastive.documents.iter().cloned());
        let lexicon = Lexicon::from_documents(&vocabulary, c.lexicon_min_count, &extra)?;
        let index = build_frequency_index(domain, self.config.window)?;
        let mut model = CleaningModel::new(lexicon, index, abbrevs);
        model.weights = c.weights;
        model.threshold = c.threshold;
        model.max_edit = c.max_edit;
        let mut report = CleaningReport::default();
        let mut cleaned: Vec<Document> = Vec::with_capacity(domain.len());
        for d in domain {
            if d.source_kind == SourceKind::Plain {
                let (doc, r) = clean_document(d, &model)?;
                report.merge(r);
                cleaned.push(doc);
            } else {
                cleaned.push(d.clone());
            }
        }
        corpora.domain.documents = cleaned;
        self.write(CLEANED, &serde_json::to_string(&corpora).expect("corpora serialize"), &mut run)?;
        self.write(CLEANING_REPORT, &report.to_jsonl(), &mut run)?;
        run.note = Some(format!(
            "{} replacements, {} unresolved",
            report.replacements.len(),
            report.unresolved.len()
        ));
        Ok(run)
    }

    fn phrase_index(docs: &[Document]) -> Result<PhraseIndex> {
        Ok(PhraseIndex::new(&tokenize_documents(docs)?))
    }

    fn frames(&self) -> Result<Run> {
        let mut run = Run::new();
        let corpora = self.load_corpora(Phase::Frames, &mut run)?;
        let domain = &corpora.domain.documents;
        let phrases = Self::phrase_index(domain)?;
        let out = process_corpus(domain, &phrases, &self.config.chunking)?;
        let mut records: Vec<_> = out.frames.iter().map(|f| f.record()).collect();
        if let Some(k) = self.config.sample_frames {
            records = sample_frames(&records, k, self.config.seed);
        }
        self.write(FRAMES, &write_jsonl(&records), &mut run)?;
        let mut decisions = String::new();
        for d in &out.decisions {
            decisions.push_str(&serde_json::to_string(d).expect("decision serializes"));
            decisions.push('\n');
        }
        self.write(MERGE_DECISIONS, &decisions, &mut run)?;
        Ok(run)
    }

    fn terms(&self) -> Result<Run> {
        let mut run = Run::new();
        let frames = read_jsonl(&self.read(Phase::Terms, FRAMES, &mut run)?, FRAMES)?;
        let corpora = self.load_corpora(Phase::Terms, &mut run)?;
        let domain = Self::phrase_index(&corpora.domain.documents)?;
        let contrastive = Self::phrase_index(&corpora.contrastive.documents)?;
        let inputs = TermInputs::build(&frames, &domain, &contrastive, self.config.termhood);
        for m in Measure::ALL {
            let list = rank_terms(&inputs, m)?;
            self.write(&m.file_name(), &list.to_tsv(), &mut run)?;
        }
        Ok(run)
    }

    fn ranked(&self, phase: Phase, run: &mut Run) -> Result<RankedTermList> {
        let name = self.config.measure.file_name();
        RankedTermList::from_tsv(self.config.measure, &self.read(phase, &name, run)?, &name)
    }

    fn cluster(&self) -> Result<Run> {
        let mut run = Run::new();
        let list = self.ranked(Phase::Cluster, &mut run)?;
        let terms: Vec<String> = select_top_n(&list, self.config.top_n)?
            .into_iter()
            .map(|c| c.normalized)
            .collect();
        if terms.is_empty() {
            return Err(Error::EmptyInput("no ranked terms to cluster"));
        }
        let cached = self.out(DISTANCES);
        let reuse = if self.config.cluster.reuse_distances && cached.is_file() {
            let text = fs::read_to_string(&cached).map_err(|e| Error::io(&cached, e))?;
            DistanceMatrix::from_tsv(&text, DISTANCES)
                .ok()
                .filter(|m| m.terms() == terms.as_slice())
        } else {
            None
        };
        let matrix = match reuse {
            Some(m) => {
                log::info!("reusing {DISTANCES}");
                m
            }
            None => {
                let provider: Box<dyn HitCountProvider> = match &self.config.snapshot_path {
                    Some(p) => {
                        Self::read_external(p, &mut run)?;
                        Box::new(load_hit_count_snapshot(p)?)
                    }
                    None => {
                        let corpora = self.load_corpora(Phase::Cluster, &mut run)?;
                        let idx = Self::phrase_index(&corpora.domain.documents)?;
                        Box::new(HitCountSnapshot::from_documents(&idx, &terms))
                    }
                };
                build_distance_matrix(&terms, provider.as_ref())?
            }
        };
        self.write(DISTANCES, &matrix.to_tsv(), &mut run)?;
        let root = tta_cluster(&matrix, &self.config.cluster_params())?;
        let mut text = serde_json::to_string_pretty(&root).expect("tree serializes");
        text.push('\n');
        self.write(CLUSTER_TREE, &text, &mut run)?;
        Ok(run)
    }

    fn ontology(&self) -> Result<Run> {
        let mut run = Run::new();
        let text = self.read(Phase::Ontology, CLUSTER_TREE, &mut run)?;
        let root: ClusterNode = serde_json::from_str(&text).map_err(|e| Error::json(CLUSTER_TREE, e))?;
        let g = assemble_ontology(&root)?;
        self.write(ONTOLOGY_JSON, &export_json(&g), &mut run)?;
        self.write(ONTOLOGY_DOT, &export_dot(&g), &mut run)?;
        self.write(ONTOLOGY_TTL, &export_turtle(&g), &mut run)?;
        Ok(run)
    }

    fn eval(&self) -> Result<Run> {
        let Some(bench_path) = &self.config.benchmark_path else {
            return Ok(Run::skipped("no benchmark_path configured"));
        };
        let mut run = Run::new();
        let list = self.ranked(Phase::Eval, &mut run)?;
        let g = import_json(&self.read(Phase::Eval, ONTOLOGY_JSON, &mut run)?, ONTOLOGY_JSON)?;
        let benchmark =
            BenchmarkConceptSet::from_json(&Self::read_external(bench_path, &mut run)?, &bench_path.display().to_string())?;
        let precision_at_n = match &self.config.judgments_path {
            Some(p) => {
                let j = load_judgments(&Self::read_external(p, &mut run)?, &p.display().to_string())?;
                Some(precision(&judge_top_n(&list, self.config.top_n, &j))?)
            }
            None => None,
        };
        let report = EvalReport::build(
            self.config.measure,
            self.config.top_n,
            precision_at_n,
            &DiscoveredConcept::from_graph(&g),
            &benchmark,
            self.config.tau,
        )?;
        self.write(EVAL_REPORT, &report.to_json(), &mut run)?;
        self.write(FREQUENCY_CSV, &frequency_distribution_report(&list)?, &mut run)?;
        Ok(run)
    }
}

/// Digests of the produced artifacts, keyed by file name.
pub fn output_digests(records: &[PhaseRecord]) -> BTreeMap<String, String> {
    records
        .iter()
        .flat_map(|r| r.outputs.iter().map(|d| (d.path.clone(), d.sha256.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(dir: &Path) -> PipelineConfig {
        let domain = dir.join("domain");
        let contrastive = dir.join("contrastive");
        fs::create_dir_all(&domain).unwrap();
        fs::create_dir_all(&contrastive).unwrap();
        fs::write(domain.join("a.txt"), "The plant hazard was reviewed.").unwrap();
        fs::write(contrastive.join("b.txt"), "The game was won.").unwrap();
        serde_json::from_value(serde_json::json!({
            "domain_dir": domain,
            "contrastive_dir": contrastive,
            "out_dir": dir.join("out"),
        }))
        .unwrap()
    }

    #[test]
    fn defaults_and_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(dir.path());
        assert_eq!(cfg.top_n, 36);
        assert_eq!(cfg.measure, Measure::Th);
        cfg.apply(&Overrides::default(), Some("env".into()));
        assert_eq!(cfg.out_dir, PathBuf::from("env"));
        let flags = Overrides {
            out_dir: Some("flag".into()),
            seed: Some(9),
            ..Overrides::default()
        };
        cfg.apply(&flags, Some("env".into()));
        assert_eq!(cfg.out_dir, PathBuf::from("flag"));
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn validation_lists_every_field() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(dir.path());
        cfg.top_n = 0;
        cfg.window = 0;
        cfg.domain_dir = dir.path().join("missing");
        let Err(Error::Validation(problems)) = cfg.validate() else {
            panic!("expected validation error");
        };
        assert_eq!(problems.len(), 3);
    }

    #[test]
    fn relative_paths_follow_the_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cfg.json");
        fs::write(&p, r#"{"domain_dir": "d", "contrastive_dir": "c", "benchmark_path": "b.json"}"#).unwrap();
        let cfg = PipelineConfig::from_file(&p).unwrap();
        assert_eq!(cfg.domain_dir, dir.path().join("d"));
        assert_eq!(cfg.benchmark_path, Some(dir.path().join("b.json")));
        assert_eq!(cfg.out_dir, dir.path().join("out"));
        fs::write(&p, r#"{"domain_dir": "d", "bogus": 1}"#).unwrap();
        assert!(PipelineConfig::from_file(&p).is_err());
    }

    #[test]
    fn terms_without_frames_is_a_dependency_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = Pipeline::new(config(dir.path())).unwrap();
        let err = p.run_phase(Phase::Terms).unwrap_err();
        assert!(matches!(err, Error::Dependency { ref file, .. } if file == FRAMES));
    }

    #[test]
    fn cleaning_skipped_when_disabled() {
        let dir = tempfile::tempdir().unwrap();
        let p = Pipeline::new(config(dir.path())).unwrap();
        p.run_phase(Phase::Ingest).unwrap();
        let rec = p.run_phase(Phase::Clean).unwrap();
        assert_eq!(rec.status, PhaseStatus::Skipped);
        let m = p.load_manifest().unwrap().unwrap();
        assert_eq!(m.phases.len(), 2);
        assert_eq!(m.record(Phase::Ingest).unwrap().outputs[0].path, INGEST);
    }

    #[test]
    fn phase_names() {
        for p in Phase::ALL {
            assert_eq!(p.name().parse::<Phase>().unwrap(), p);
        }
        assert!("bogus".parse::<Phase>().is_err());
    }
}
