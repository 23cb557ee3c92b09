use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::mlp::Mlp;
use super::model::SelectorModel;
use crate::descriptors::DescriptorId;
use crate::error::{Error, Result};
use crate::store::NormStats;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainParams {
    pub hidden: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Epochs without holdout improvement before stopping.
    pub patience: usize,
    pub holdout_fraction: f64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            hidden: 64,
            batch_size: 32,
            learning_rate: 0.01,
            max_epochs: 200,
            patience: 20,
            holdout_fraction: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingReport {
    pub epochs_run: usize,
    /// Training loss after each epoch. An epoch whose loss rose is rolled
    /// back (and the learning rate halved), so this never increases.
    pub train_loss: Vec<f64>,
    pub lr_halvings: usize,
    pub holdout_size: usize,
    pub holdout_accuracy: f64,
    pub train_accuracy: f64,
    /// Holdout counts, `confusion[actual][predicted]`.
    pub confusion: [[usize; 3]; 3],
}

impl TrainingReport {
    /// Confusion matrix rows followed by the scalar accuracies.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = crate::compat::csv_writer(path)?;
        w.write_record(["actual", "pred_loci", "pred_fourier", "pred_zoning"])?;
        for d in DescriptorId::ALL {
            let row = self.confusion[d.index()];
            w.write_record([d.to_string(), row[0].to_string(), row[1].to_string(), row[2].to_string()])?;
        }
        w.write_record(["holdout_accuracy", &self.holdout_accuracy.to_string(), "", ""])?;
        w.write_record(["train_accuracy", &self.train_accuracy.to_string(), "", ""])?;
        w.flush()?;
        Ok(())
    }
}

/// Stratified holdout: about `fraction` of each class, at least one sample
/// from every class that has two or more.
fn holdout_split(labels: &[usize], fraction: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    let mut holdout = Vec::new();
    for class in 0..3 {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(rng);
        let take = if members.len() < 2 {
            0
        } else {
            ((fraction * members.len() as f64).round() as usize).clamp(1, members.len() - 1)
        };
        holdout.extend_from_slice(&members[..take]);
    }
    holdout.sort_unstable();
    let train = (0..labels.len()).filter(|i| holdout.binary_search(i).is_err()).collect();
    (train, holdout)
}

fn accuracy(mlp: &Mlp, xs: &[Vec<f64>], ys: &[usize], subset: &[usize]) -> f64 {
    if subset.is_empty() {
        return f64::NAN;
    }
    let correct = subset
        .iter()
        .filter(|&&i| argmax(&mlp.forward(&xs[i]).probs) == ys[i])
        .count();
    correct as f64 / subset.len() as f64
}

fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in p.iter().enumerate() {
        if v > p[best] {
            best = i;
        }
    }
    best
}

/// Trains a selector on raw feature vectors and their best-descriptor labels.
///
/// Features are z-scored with statistics fitted here. Training is mini-batch
/// gradient descent on class-weighted cross-entropy. The returned weights are
/// those with the best holdout accuracy, lower training loss breaking ties.
/// Identical inputs and seed give a bit-identical model.
pub fn train(
    features: &[Vec<f64>],
    labels: &[DescriptorId],
    seed: u64,
    params: &TrainParams,
) -> Result<(SelectorModel, TrainingReport)> {
    if features.len() != labels.len() {
        return Err(Error::InvalidConfig(format!(
            "{} feature rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    let dim = features.first().map_or(0, Vec::len);
    if let Some(bad) = features.iter().find(|f| f.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    for d in DescriptorId::ALL {
        if !labels.contains(&d) {
            return Err(Error::MissingClass(d));
        }
    }
    if params.batch_size == 0 || params.hidden == 0 {
        return Err(Error::InvalidConfig("batch size and hidden width must be positive".into()));
    }

    let norm = NormStats::fit(features.iter().map(Vec::as_slice), dim).to_f32_precision();
    let xs: Vec<Vec<f64>> = features.iter().map(|f| norm.apply(f)).collect();
    let ys: Vec<usize> = labels.iter().map(|d| d.index()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train_idx, holdout_idx) = holdout_split(&ys, params.holdout_fraction, &mut rng);

    let mut counts = [0usize; 3];
    for &i in &train_idx {
        counts[ys[i]] += 1;
    }
    let class_weights: Vec<f64> = counts
        .iter()
        .map(|&c| if c == 0 { 0.0 } else { train_idx.len() as f64 / (3.0 * c as f64) })
        .collect();

    let train_sorted = train_idx.clone();
    let train_x: Vec<&[f64]> = train_idx.iter().map(|&i| xs[i].as_slice()).collect();
    let train_y: Vec<usize> = train_idx.iter().map(|&i| ys[i]).collect();
    let full_loss = |m: &Mlp| m.loss(&train_x, &train_y, &class_weights);

    let mut mlp = Mlp::init(dim, params.hidden, 3, &mut rng);
    let mut loss = full_loss(&mlp);
    let mut rate = params.learning_rate;
    let score = |m: &Mlp, loss: f64| {
        let acc = if holdout_idx.is_empty() {
            accuracy(m, &xs, &ys, &train_sorted)
        } else {
            accuracy(m, &xs, &ys, &holdout_idx)
        };
        (acc, loss)
    };
    let better = |a: (f64, f64), b: (f64, f64)| a.0 > b.0 || (a.0 == b.0 && a.1 < b.1);

    let mut best = (mlp.clone(), score(&mlp, loss));
    let mut stall = 0;
    let mut report = TrainingReport {
        epochs_run: 0,
        train_loss: Vec::new(),
        lr_halvings: 0,
        holdout_size: holdout_idx.len(),
        holdout_accuracy: 0.0,
        train_accuracy: 0.0,
        confusion: [[0; 3]; 3],
    };

    for _ in 0..params.max_epochs {
        report.epochs_run += 1;
        let previous = mlp.clone();
        train_idx.shuffle(&mut rng);
        for batch in train_idx.chunks(params.batch_size) {
            let bx: Vec<&[f64]> = batch.iter().map(|&i| xs[i].as_slice()).collect();
            let by: Vec<usize> = batch.iter().map(|&i| ys[i]).collect();
            let (_, grad) = mlp.loss_and_grad(&bx, &by, &class_weights);
            mlp.step(&grad, rate);
        }
        let epoch_loss = full_loss(&mlp);
        if epoch_loss > loss || !epoch_loss.is_finite() {
            mlp = previous;
            rate *= 0.5;
            report.lr_halvings += 1;
        } else {
            loss = epoch_loss;
        }
        report.train_loss.push(loss);

        let s = score(&mlp, loss);
        if better(s, best.1) {
            best = (mlp.clone(), s);
            stall = 0;
        } else {
            stall += 1;
            if stall >= params.patience {
                break;
            }
        }
    }

    let model = SelectorModel::new(best.0, norm);
    let final_mlp = &model.mlp;
    for &i in &holdout_idx {
        let predicted = argmax(&final_mlp.forward(&xs[i]).probs);
        report.confusion[ys[i]][predicted] += 1;
    }
    report.holdout_accuracy = accuracy(final_mlp, &xs, &ys, &holdout_idx);
    report.train_accuracy = accuracy(final_mlp, &xs, &ys, &train_sorted);
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holdout_is_stratified() {
        let labels: Vec<usize> = (0..60).map(|i| i % 3).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (train, holdout) = holdout_split(&labels, 0.1, &mut rng);
        assert_eq!(train.len() + holdout.len(), 60);
        for c in 0..3 {
            assert_eq!(holdout.iter().filter(|&&i| labels[i] == c).count(), 2);
        }
    }

    #[test]
    fn missing_class_is_an_error() {
        let f = vec![vec![0.0, 1.0]; 4];
        let l = [DescriptorId::Loci, DescriptorId::Loci, DescriptorId::Zoning, DescriptorId::Zoning];
        assert!(matches!(
            train(&f, &l, 0, &TrainParams::default()),
            Err(Error::MissingClass(DescriptorId::Fourier))
        ));
    }
}
