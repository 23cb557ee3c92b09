use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::reduce::{Method, Reducer};
use crate::compat::csv_writer;
use crate::descriptors::DescriptorId;
use crate::error::{Error, Result};
use crate::retrieval::{metric_report, MetricReport};
use crate::selector::SelectorModel;
use crate::store::FeatureStore;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Training-split feature store; doubles as the lexicon.
    pub lexicon: PathBuf,
    pub test: PathBuf,
    pub model: PathBuf,
    pub methods: Vec<Method>,
    /// Cutoffs; [`default_grid`] when `None`.
    pub n_grid: Option<Vec<usize>>,
    pub out_dir: PathBuf,
}

/// 1, 2, 5, 10, 20, 50, 100, N/10, N/4 and N, limited to `1..=N`.
pub fn default_grid(lexicon_size: usize) -> Vec<usize> {
    let mut g: Vec<usize> = [1, 2, 5, 10, 20, 50, 100, lexicon_size / 10, lexicon_size / 4, lexicon_size]
        .into_iter()
        .filter(|&n| (1..=lexicon_size).contains(&n))
        .collect();
    g.sort_unstable();
    g.dedup();
    g
}

pub fn validate_grid(grid: &[usize], lexicon_size: usize) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty n grid".into()));
    }
    if grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(format!(
            "n grid must be strictly increasing positive integers, got {grid:?}"
        )));
    }
    if *grid.last().unwrap() > lexicon_size {
        return Err(Error::InvalidConfig(format!(
            "n grid exceeds lexicon size {lexicon_size}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryResult {
    pub query_id: String,
    pub method: Method,
    pub chosen: Option<DescriptorId>,
    pub report: MetricReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub mean_dcg: f64,
    pub n_queries: usize,
    pub n_unevaluable: usize,
    /// Macro-averaged over queries, aligned with the evaluation grid.
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub dor: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub lexicon_size: usize,
    pub grid: Vec<usize>,
    pub methods: Vec<Method>,
    /// Ordered by query id, then by method order.
    pub results: Vec<QueryResult>,
    /// Test queries whose label is absent from the lexicon.
    pub unevaluable: Vec<String>,
}

impl Evaluation {
    pub fn summary(&self, method: Method) -> MethodSummary {
        let rows: Vec<&QueryResult> = self.results.iter().filter(|r| r.method == method).collect();
        let n = rows.len();
        let mean = |f: &dyn Fn(&QueryResult) -> f64| {
            if n == 0 {
                f64::NAN
            } else {
                rows.iter().map(|r| f(r)).sum::<f64>() / n as f64
            }
        };
        MethodSummary {
            method,
            mean_dcg: mean(&|r| r.report.dcg),
            n_queries: n,
            n_unevaluable: self.unevaluable.len(),
            precision: self.grid.iter().map(|k| mean(&|r| r.report.precision_at[k])).collect(),
            recall: self.grid.iter().map(|k| mean(&|r| r.report.recall_at[k])).collect(),
            dor: self
                .grid
                .iter()
                .map(|&k| crate::retrieval::degree_of_reduction(self.lexicon_size, k))
                .collect(),
        }
    }

    pub fn mean_dcg(&self, method: Method) -> f64 {
        self.summary(method).mean_dcg
    }

    /// Writes every CSV artifact into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let summaries: Vec<MethodSummary> = self.methods.iter().map(|&m| self.summary(m)).collect();

        let mut w = csv_writer(&dir.join("dcg_table.csv"))?;
        w.write_record(["method", "mean_dcg", "n_queries", "n_unevaluable"])?;
        for s in &summaries {
            w.write_record([
                s.method.to_string(),
                s.mean_dcg.to_string(),
                s.n_queries.to_string(),
                s.n_unevaluable.to_string(),
            ])?;
        }
        w.flush()?;

        let mut w = csv_writer(&dir.join("per_query_dcg.csv"))?;
        w.write_record(["query_id", "descriptor", "dcg"])?;
        for r in &self.results {
            w.write_record([r.query_id.as_str(), r.method.name(), &r.report.dcg.to_string()])?;
        }
        w.flush()?;

        if self.methods.contains(&Method::Adaptive) {
            let mut w = csv_writer(&dir.join("adaptive_choices.csv"))?;
            w.write_record(["query_id", "chosen"])?;
            for r in self.results.iter().filter(|r| r.method == Method::Adaptive) {
                let chosen = r.chosen.map(|d| d.name()).unwrap_or("");
                w.write_record([r.query_id.as_str(), chosen])?;
            }
            w.flush()?;
        }

        for s in &summaries {
            let m = s.method.name();
            let mut pr = csv_writer(&dir.join(format!("pr_{m}.csv")))?;
            let mut dor = csv_writer(&dir.join(format!("dor_{m}.csv")))?;
            let mut curves = csv_writer(&dir.join(format!("curves_{m}.csv")))?;
            pr.write_record(["n", "precision", "recall"])?;
            dor.write_record(["n", "dor", "recall"])?;
            curves.write_record(["n", "precision", "recall", "dor"])?;
            for (i, n) in self.grid.iter().enumerate() {
                let (n, p, r, d) = (
                    n.to_string(),
                    s.precision[i].to_string(),
                    s.recall[i].to_string(),
                    s.dor[i].to_string(),
                );
                pr.write_record([&n, &p, &r])?;
                dor.write_record([&n, &d, &r])?;
                curves.write_record([&n, &p, &r, &d])?;
            }
            pr.flush()?;
            dor.flush()?;
            curves.flush()?;
        }

        let adaptive = summaries.iter().find(|s| s.method == Method::Adaptive);
        let concat = summaries.iter().find(|s| s.method == Method::Concatenated);
        if let (Some(a), Some(c)) = (adaptive, concat) {
            let mut w = csv_writer(&dir.join("fig7_overlay.csv"))?;
            w.write_record(["n", "recall_adaptive", "recall_concat"])?;
            for (i, n) in self.grid.iter().enumerate() {
                w.write_record([n.to_string(), a.recall[i].to_string(), c.recall[i].to_string()])?;
            }
            w.flush()?;
        }

        let mut text = String::new();
        writeln!(text, "lexicon size: {}", self.lexicon_size).unwrap();
        writeln!(text, "evaluable queries: {}", self.results.len() / self.methods.len().max(1)).unwrap();
        writeln!(text, "unevaluable queries: {}", self.unevaluable.len()).unwrap();
        writeln!(text, "curves: macro-averaged over evaluable queries; recall = hits in top n / class size in lexicon").unwrap();
        for s in &summaries {
            writeln!(text, "{:>12}  mean dcg {:.4}", s.method.name(), s.mean_dcg).unwrap();
        }
        std::fs::write(dir.join("summary.txt"), text)?;
        Ok(())
    }
}

/// Runs every test query through every method against the lexicon.
pub fn evaluate_stores(
    lexicon: &FeatureStore,
    test: &FeatureStore,
    model: &SelectorModel,
    methods: &[Method],
    grid: &[usize],
) -> Result<Evaluation> {
    if test.is_empty() {
        return Err(Error::InvalidConfig("test split is empty".into()));
    }
    if methods.is_empty() {
        return Err(Error::InvalidConfig("no methods selected".into()));
    }
    validate_grid(grid, lexicon.len())?;
    let reducer = Reducer::new(lexicon, model)?;

    let per_query: Vec<Result<Option<Vec<QueryResult>>>> = (0..test.len())
        .into_par_iter()
        .map(|q| {
            let rec = &test.records()[q];
            let label = test.label_of(q);
            if lexicon.class_count(label) == 0 {
                return Ok(None);
            }
            let concat: Vec<f64> = rec.values.iter().map(|&v| v as f64).collect();
            let mut out = Vec::with_capacity(methods.len());
            for &method in methods {
                let (list, chosen) = reducer.rank(&rec.id, label, &concat, method)?;
                out.push(QueryResult {
                    query_id: rec.id.clone(),
                    method,
                    chosen,
                    report: metric_report(&list, grid)?,
                });
            }
            Ok(Some(out))
        })
        .collect();

    let mut results = Vec::new();
    let mut unevaluable = Vec::new();
    for (q, r) in per_query.into_iter().enumerate() {
        match r? {
            Some(rows) => results.extend(rows),
            None => unevaluable.push(test.records()[q].id.clone()),
        }
    }
    Ok(Evaluation {
        lexicon_size: lexicon.len(),
        grid: grid.to_vec(),
        methods: methods.to_vec(),
        results,
        unevaluable,
    })
}

/// Loads the artifacts named in `config`, evaluates, and writes the CSVs.
pub fn evaluate(config: &ExperimentConfig) -> Result<Evaluation> {
    let lexicon = FeatureStore::read(&config.lexicon)?;
    let test = FeatureStore::read(&config.test)?;
    let model = SelectorModel::load(&config.model)?;
    let grid = config
        .n_grid
        .clone()
        .unwrap_or_else(|| default_grid(lexicon.len()));
    let eval = evaluate_stores(&lexicon, &test, &model, &config.methods, &grid)?;
    eval.write(&config.out_dir)?;
    Ok(eval)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        assert_eq!(default_grid(225), vec![1, 2, 5, 10, 20, 22, 50, 56, 100, 225]);
        assert_eq!(default_grid(3), vec![1, 2, 3]);
        validate_grid(&default_grid(5282), 5282).unwrap();
    }

    #[test]
    fn grid_validation() {
        assert!(validate_grid(&[1, 1], 5).is_err());
        assert!(validate_grid(&[0, 2], 5).is_err());
        assert!(validate_grid(&[1, 6], 5).is_err());
        assert!(validate_grid(&[], 5).is_err());
    }
}
