//! Exact nearest-neighbour ranking and retrieval metrics.

mod metrics;
mod rank;

pub use metrics::{
    dcg, degree_of_reduction, ideal_dcg, metric_report, precision_recall, MetricReport,
};
pub use rank::{rank, RankedEntry, RetrievalIndex, RetrievalList};
