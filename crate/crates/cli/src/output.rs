//! CSV and JSON rendering.
//!
//! CSV layout is fixed: a stable header, `.` as the decimal separator
//! regardless of locale (Rust's `Display` for floats guarantees this), and
//! byte-identical output for identical inputs.

use crate::harness::{SweepRow, TimingProbe};
use tilecache_core::bounds::BoundsReport;
use tilecache_core::engine::SimResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub const SWEEP_CSV_HEADER: &str =
    "axis_value,policy,n,bi,bj,bk,M,reads,writes,io,olivry,hong_kung,predicted_io,normalized,feasible";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.axis_value,
            r.policy,
            r.n,
            r.bi,
            r.bj,
            r.bk,
            r.capacity,
            r.reads,
            r.writes,
            r.io,
            r.olivry,
            r.hong_kung,
            r.predicted_io,
            r.normalized,
            r.feasible
        ));
    }
    out
}

pub fn sweep_json(rows: &[SweepRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

pub fn sim_result_csv(r: &SimResult) -> String {
    format!(
        "reads,writes,io,events\n{},{},{},{}\n",
        r.reads, r.writes, r.io, r.events
    )
}

pub fn sim_result_json(r: &SimResult) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("result serializes");
    s.push('\n');
    s
}

pub fn bounds_json(reports: &[BoundsReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

pub fn timing_table(probe: &TimingProbe) -> String {
    let mut out = format!(
        "engine={} n={} events={}\nM,seconds,ns_per_event\n",
        probe.engine.name(),
        probe.n,
        probe.events
    );
    for row in &probe.rows {
        out.push_str(&format!(
            "{},{:.6},{:.2}\n",
            row.capacity, row.seconds, row.per_event_ns
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_sweep, EngineChoice, ExperimentConfig, Policy, SweepAxis};
    use tilecache_core::trace::BlockSpec;

    fn sample_rows() -> Vec<SweepRow> {
        run_sweep(&ExperimentConfig {
            capacity: 24,
            axis: SweepAxis::N {
                block: BlockSpec::unit(),
            },
            start: 2,
            stop: 2,
            step: 1,
            policies: vec![Policy::Lru],
            engine: EngineChoice::Fast,
        })
        .unwrap()
        .rows
    }

    #[test]
    fn csv_has_the_fixed_column_order() {
        let text = sweep_csv(&sample_rows());
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(SWEEP_CSV_HEADER));
        let row = lines.next().unwrap();
        assert!(row.starts_with("2,lru,2,1,1,1,24,"), "{row}");
        assert_eq!(row.split(',').count(), 15);
        assert!(!text.contains(',') || !text.contains(";"));
    }

    #[test]
    fn json_mirrors_the_csv_fields() {
        let text = sweep_json(&sample_rows());
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let row = &value.as_array().unwrap()[0];
        for key in SWEEP_CSV_HEADER.split(',') {
            assert!(row.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(row["policy"], "lru");
        assert_eq!(row["M"], 24);
    }

    #[test]
    fn sim_result_renders_both_ways() {
        let r = SimResult {
            reads: 12,
            writes: 4,
            io: 16,
            events: 24,
        };
        assert_eq!(sim_result_csv(&r), "reads,writes,io,events\n12,4,16,24\n");
        let v: serde_json::Value = serde_json::from_str(&sim_result_json(&r)).unwrap();
        assert_eq!(v["io"], 16);
    }

    #[test]
    fn bounds_report_has_the_fixed_keys() {
        let report = tilecache_core::bounds::bounds_report(
            100,
            220,
            tilecache_core::bounds::TileShape::Rect,
        )
        .unwrap();
        let text = bounds_json(&[report]);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let r = &v.as_array().unwrap()[0];
        for key in [
            "n",
            "M",
            "shape",
            "b",
            "predicted_io_exact",
            "predicted_io_asymptotic",
            "hong_kung",
            "olivry",
        ] {
            assert!(r.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(r["shape"], "rect");
        assert_eq!(r["b"], 13);
    }
}
