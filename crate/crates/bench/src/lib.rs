//! Fixtures shared by the benchmarks.

use lexred_core::corpus::synth::render;
use lexred_core::corpus::{Family, ShapeImage, Source};
use lexred_core::store::FeatureRecord;
use lexred_core::{FeatureStore, CONCAT_DIM};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One preprocessed synthetic image per family.
pub fn sample_images() -> Vec<ShapeImage> {
    Family::ALL
        .iter()
        .map(|&f| ShapeImage {
            id: f.name().to_string(),
            label: f.name().to_string(),
            source: Source::Synthetic,
            raster: render(f, 3, 0, 42),
        })
        .collect()
}

/// A store of `n` uniform random feature vectors spread over 100 labels.
pub fn random_store(n: usize, seed: u64) -> FeatureStore {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = (0..n)
        .map(|i| FeatureRecord {
            id: format!("s{i:06}"),
            label: (i % 100) as u32,
            values: (0..CONCAT_DIM).map(|_| rng.gen::<f32>()).collect(),
        })
        .collect();
    FeatureStore::from_records((0..100).map(|c| format!("c{c:02}")).collect(), records)
        .expect("ids are unique")
}

pub fn random_relevance(n: usize, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_bool(0.02)).collect()
}
