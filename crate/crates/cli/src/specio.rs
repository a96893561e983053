//! Process-spec input: a JSON file, inline flags, or both, with the flags
//! overriding the file's fields.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use skellam_core::{ProcessSpec, RateFunction, Variant};

/// Spec source shared by the subcommands. A spec comes from `--spec` and/or
/// the inline flags; inline rates are constant-rate shorthand, anything
/// time-varying needs the JSON form.
#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    /// Process spec as JSON ({"variant", "k", "up", "down", "alpha"});
    /// the flags below override its fields
    #[arg(long, value_name = "FILE")]
    pub spec: Option<PathBuf>,
    /// Process family: gcp, gfcp, ngcp, ngfcp, nhgfcp, gsp, gfsp, ngsp,
    /// ngfsp, nhgfsp, run_avg_gcp, run_avg_gsp
    #[arg(long)]
    pub variant: Option<String>,
    /// Fractional order in (0, 1]; 1 for the non-fractional families
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Constant up rates for jump sizes 1..k, comma-separated
    #[arg(long, value_name = "R1,R2,..")]
    pub up: Option<String>,
    /// Constant down rates for jump sizes 1..k, comma-separated
    #[arg(long, value_name = "R1,R2,..")]
    pub down: Option<String>,
}

pub fn parse_variant(name: &str) -> Result<Variant> {
    serde_json::from_value(serde_json::Value::String(name.to_ascii_lowercase()))
        .with_context(|| format!("unknown variant '{name}'"))
}

fn parse_rates(list: &str) -> Result<Vec<RateFunction>> {
    list.split(',')
        .map(|s| {
            let rate: f64 = s
                .trim()
                .parse()
                .with_context(|| format!("bad rate '{s}' (expected a number)"))?;
            Ok(RateFunction::Constant { rate })
        })
        .collect()
}

impl SpecArgs {
    /// Assemble and validate the spec. Errors if neither a file nor enough
    /// inline flags describe one.
    pub fn load(&self) -> Result<ProcessSpec> {
        let mut spec = match &self.spec {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading spec file {}", path.display()))?;
                serde_json::from_str::<ProcessSpec>(&text)
                    .with_context(|| format!("parsing spec file {}", path.display()))?
            }
            None => {
                let Some(variant) = &self.variant else {
                    bail!("no spec: pass --spec FILE or at least --variant with --up");
                };
                let Some(up) = &self.up else {
                    bail!("inline specs need --up (and --down for difference variants)");
                };
                let up = parse_rates(up)?;
                ProcessSpec {
                    variant: parse_variant(variant)?,
                    k: up.len(),
                    up,
                    down: Vec::new(),
                    alpha: 1.0,
                }
            }
        };
        if self.spec.is_some() {
            if let Some(variant) = &self.variant {
                spec.variant = parse_variant(variant)?;
            }
            if let Some(up) = &self.up {
                spec.up = parse_rates(up)?;
                spec.k = spec.up.len();
            }
        }
        if let Some(down) = &self.down {
            spec.down = parse_rates(down)?;
        }
        if let Some(alpha) = self.alpha {
            spec.alpha = alpha;
        } else if self.spec.is_none() && spec.variant.is_fractional() {
            bail!("fractional variants need --alpha");
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Seed precedence: `--seed`, then `SKELLAM_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("SKELLAM_SEED") {
        Ok(text) => text
            .trim()
            .parse()
            .with_context(|| format!("SKELLAM_SEED='{text}' is not an unsigned integer")),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(err) => Err(err).context("reading SKELLAM_SEED"),
    }
}
