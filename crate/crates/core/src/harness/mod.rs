//! Scenario configuration, the end-to-end pipeline, the translation
//! diffeomorphism checks and report/plot emission.

mod checks;
mod config;
mod diffeo;
mod pipeline;
mod report;

pub use checks::{
    deglin_report, diffeo_report, direct_halfspace_report, halfspace_report, metric_report, ode_report, weiss_report,
};
pub use config::{CheckSection, DataTerm, GridSection, ModelSection, OutputSection, ScenarioConfig, SeriesSection};
pub use diffeo::{diffeo_check, diffeo_map, diffeo_reference, eta, DIFFEO_STEPS};
pub use pipeline::{run_pipeline, shell_radii};
pub use report::{emit_plot_data, plot_csv, CheckRecord, Environment, PlotData, ReportDocument, PLOT_SELECTORS};
