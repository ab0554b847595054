//! The chart data shipped with the crate.

use super::{Chart, ChartError};

const CHARTS: &[(&str, &str)] = &[
    (
        "c4-mod4-lambda4-deg11",
        include_str!("../../data/charts/c4-mod4-lambda4-deg11.chart"),
    ),
    (
        "c4-integral-lambda4-deg9-10",
        include_str!("../../data/charts/c4-integral-lambda4-deg9-10.chart"),
    ),
    (
        "c4-integral-lambda4-deg13",
        include_str!("../../data/charts/c4-integral-lambda4-deg13.chart"),
    ),
    (
        "c2-integral-lambda4-deg9",
        include_str!("../../data/charts/c2-integral-lambda4-deg9.chart"),
    ),
];

/// Names of the bundled charts, in shipping order.
pub fn bundled_chart_names() -> Vec<&'static str> {
    CHARTS.iter().map(|(name, _)| *name).collect()
}

/// Raw text of a bundled chart.
pub fn bundled_chart(name: &str) -> Option<&'static str> {
    CHARTS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

/// Parse and validate a bundled chart by name.
pub fn load_bundled(name: &str) -> Option<Result<Chart, ChartError>> {
    bundled_chart(name).map(super::format::load_str)
}
