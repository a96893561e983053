//! Tick pipeline front end: run a simulated path through the bid filter and
//! check the round trip, or filter a real timestamp,price CSV and fit
//! waiting-time models to the surviving jump series.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Serialize;
use skellam_core::samplers::{
    sample_gfsp, sample_ngfsp, sample_ngsp, sample_nhgfsp, ClockMode, NgspMethod, RngStream,
    SamplePath,
};
use skellam_core::tickdata::{
    bid_filter, extract_jumps, fit_exponential, fit_mittag_leffler, FitReport, JumpSeries,
    TickRecord,
};
use skellam_core::Variant;

use crate::emit;
use crate::specio::{resolve_seed, SpecArgs};

#[derive(Args, Debug)]
pub struct TickArgs {
    /// "synthetic" to simulate one path from the spec and replay it through
    /// the filter, or a CSV file of timestamp,price records
    #[arg(long)]
    pub input: String,
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Horizon for the synthetic path
    #[arg(long, default_value_t = 8.0)]
    pub t_end: f64,
    /// Anchor price for the synthetic stream
    #[arg(long, default_value_t = 100.0)]
    pub base_price: f64,
    /// Minimum price increment
    #[arg(long, default_value_t = 1e-4)]
    pub tick_size: f64,
    /// Subordinator grid step for the shared-clock variants
    /// (default: t_end / 16384)
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// RNG seed for the synthetic path (default: SKELLAM_SEED, then 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Per-direction filter outcome with whichever fits had enough data.
#[derive(Serialize)]
struct SideReport {
    events: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponential: Option<FitReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mittag_leffler: Option<FitReport>,
}

#[derive(Serialize)]
struct TickReport {
    input: String,
    records: usize,
    retained: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    planted_up: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    planted_down: Option<usize>,
    /// Synthetic runs only: the filtered event times match the planted
    /// ones exactly, per direction.
    #[serde(skip_serializing_if = "Option::is_none")]
    round_trip_exact: Option<bool>,
    up: SideReport,
    down: SideReport,
}

fn side_report(series: &JumpSeries) -> SideReport {
    let waits = series.interarrivals();
    SideReport {
        events: series.len(),
        exponential: fit_exponential(&waits).ok(),
        mittag_leffler: fit_mittag_leffler(&waits).ok(),
    }
}

fn sample_path(args: &TickArgs) -> Result<SamplePath> {
    let spec = args.spec.load()?;
    if !(args.t_end > 0.0) || !args.t_end.is_finite() {
        bail!("--t-end must be positive and finite");
    }
    let seed = resolve_seed(args.seed)?;
    let mut rng = RngStream::new(seed, 0);
    let path = match spec.variant {
        Variant::Gcp | Variant::Gfcp | Variant::Gsp | Variant::Gfsp => {
            sample_gfsp(&spec, args.t_end, &mut rng, ClockMode::Independent)?
        }
        Variant::Ngcp | Variant::Ngsp => {
            sample_ngsp(&spec, args.t_end, &mut rng, NgspMethod::Thinning)?
        }
        Variant::Ngfcp | Variant::Ngfsp => {
            let h = args.grid_step.unwrap_or(args.t_end / 16384.0);
            if !(h > 0.0) || h > args.t_end {
                bail!("--grid-step must be in (0, t_end]");
            }
            sample_ngfsp(&spec, args.t_end, h, &mut rng, ClockMode::Independent)?
        }
        Variant::Nhgfcp | Variant::Nhgfsp => {
            sample_nhgfsp(&spec, args.t_end, &mut rng, ClockMode::Independent)?
        }
        Variant::RunAvgGcp | Variant::RunAvgGsp => {
            bail!("running averages are real-valued; the tick pipeline needs an integer path")
        }
    };
    Ok(path)
}

/// Planted jump times by direction, deduplicated the same way the
/// extraction step dedups, so the round-trip comparison is apples to
/// apples even if two jumps land on one timestamp.
fn planted_times(path: &SamplePath) -> (Vec<f64>, Vec<f64>) {
    let mut up = Vec::new();
    let mut down = Vec::new();
    let mut prev = 0i64;
    for (&t, &state) in path.times.iter().zip(&path.states) {
        let series = if state > prev { &mut up } else { &mut down };
        if series.last() != Some(&t) {
            series.push(t);
        }
        prev = state;
    }
    (up, down)
}

fn read_tick_csv(path: &str) -> Result<Vec<TickRecord>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading tick file {path}"))?;
    let mut records = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',');
        let (Some(ts), Some(price)) = (fields.next(), fields.next()) else {
            bail!("{path}:{}: expected timestamp,price", lineno + 1);
        };
        let parsed = ts.trim().parse::<f64>().and_then(|timestamp| {
            price
                .trim()
                .parse::<f64>()
                .map(|price| TickRecord { timestamp, price })
        });
        match parsed {
            Ok(record) => records.push(record),
            // a single unparseable first line is a header
            Err(_) if lineno == 0 => continue,
            Err(err) => bail!("{path}:{}: {err}", lineno + 1),
        }
    }
    Ok(records)
}

pub fn run(args: TickArgs) -> Result<ExitCode> {
    if !(args.tick_size > 0.0) || !args.tick_size.is_finite() {
        bail!("--tick-size must be positive and finite");
    }

    let report = if args.input == "synthetic" {
        let path = sample_path(&args)?;
        let ticks = skellam_core::tickdata::synthetic_ticks(&path, args.base_price, args.tick_size)?;
        let events = bid_filter(&ticks, args.tick_size)?;
        let (up, down) = extract_jumps(&events);
        let (planted_up, planted_down) = planted_times(&path);
        TickReport {
            input: args.input.clone(),
            records: ticks.len(),
            retained: events.len(),
            planted_up: Some(planted_up.len()),
            planted_down: Some(planted_down.len()),
            round_trip_exact: Some(
                planted_up == up.event_times && planted_down == down.event_times,
            ),
            up: side_report(&up),
            down: side_report(&down),
        }
    } else {
        let ticks = read_tick_csv(&args.input)?;
        let events = bid_filter(&ticks, args.tick_size)?;
        let (up, down) = extract_jumps(&events);
        TickReport {
            input: args.input.clone(),
            records: ticks.len(),
            retained: events.len(),
            planted_up: None,
            planted_down: None,
            round_trip_exact: None,
            up: side_report(&up),
            down: side_report(&down),
        }
    };

    emit::emit_report(args.out.as_deref(), &emit::to_json_pretty(&report)?)?;
    Ok(ExitCode::SUCCESS)
}
