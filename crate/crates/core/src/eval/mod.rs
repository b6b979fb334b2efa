//! Segmentation scoring, dataset statistics and ablation reports.

mod ablation;
mod metrics;
mod report;

pub use ablation::{
    run_ablation, CommandPredictor, EvalDataset, EvalItem, EvalReport, ImageScore, ItemFailure, Predictor,
};
pub use metrics::{confusion, dataset_stats, iou, ConfusionCounts};
pub use report::{parse_csv_report, render_report, ReportFormat, ReportRow};
