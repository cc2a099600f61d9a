//! Command-line front end. The binary only parses arguments and calls [`run`].

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bounds::{self, CAnchor};
use crate::combinat::{even_grid, TradeoffCurve};
use crate::error::{Error, Result};
use crate::model::{
    fmt_decimal, fmt_rational, parse_rational, rat, DemandVector, Rational, SystemParams,
};
use crate::scheme_a::SchemeAParams;
use crate::scheme_b::SchemeBParams;
use crate::sim::{self, Scheme};
use crate::verify::{self, ExactOptions};

#[derive(Debug, Parser)]
#[command(
    name = "d2dcache",
    version,
    about = "Private D2D coded caching: simulate, verify, evaluate bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeKind {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveKind {
    #[value(name = "schemeA")]
    SchemeA,
    #[value(name = "schemeB")]
    SchemeB,
    #[value(name = "schemeC")]
    SchemeC,
    #[value(name = "conv2u")]
    Conv2u,
    #[value(name = "convKu")]
    ConvKu,
    #[value(name = "sharedlink")]
    SharedLink,
    #[value(name = "sharedlink-uncoded")]
    SharedLinkUncoded,
}

impl CurveKind {
    fn name(self) -> &'static str {
        match self {
            CurveKind::SchemeA => "schemeA",
            CurveKind::SchemeB => "schemeB",
            CurveKind::SchemeC => "schemeC",
            CurveKind::Conv2u => "conv2u",
            CurveKind::ConvKu => "convKu",
            CurveKind::SharedLink => "sharedlink",
            CurveKind::SharedLinkUncoded => "sharedlink-uncoded",
        }
    }

    fn is_converse(self) -> bool {
        matches!(
            self,
            CurveKind::Conv2u | CurveKind::ConvKu | CurveKind::SharedLink
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnchorFlag {
    #[value(name = "n-over-k")]
    NOverK,
    #[value(name = "k-over-n")]
    KOverN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeFlag {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Baseline {
    Nonprivate,
}

#[derive(Debug, clap::Args)]
pub struct SchemeArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeKind,
    #[arg(long = "K", default_value_t = 2)]
    pub k: usize,
    #[arg(long = "N")]
    pub n: usize,
    /// Parameter of the virtual-user scheme.
    #[arg(long)]
    pub t: Option<usize>,
    /// Parameter of the two-user scheme; `N` selects the full-memory point.
    #[arg(long)]
    pub tprime: Option<usize>,
    /// Defaults to `$D2D_SEED`, else 0.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one protocol instance and report its load.
    Simulate {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long)]
        demands: String,
        /// Requested file size in bits, rounded up to the subpacketization.
        #[arg(long = "B-target", default_value_t = 1)]
        b_target: u64,
        /// Where to write the transcript.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a memory-load curve as CSV.
    Curve {
        #[arg(long = "K")]
        k: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, value_enum)]
        which: CurveKind,
        #[arg(long = "c-anchor", value_enum, default_value = "n-over-k")]
        c_anchor: AnchorFlag,
        /// Multiplies the shared-link loads.
        #[arg(long, default_value = "1")]
        factor: String,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest ratio between an achievable curve and a converse.
    Gap {
        #[arg(long = "K")]
        k: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, value_enum)]
        achievable: CurveKind,
        /// Comma-separated converse curves, each optionally divided as
        /// `name/d`; their pointwise maximum is used.
        #[arg(long)]
        converse: String,
        #[arg(long = "grid-density", default_value_t = 64)]
        grid_density: usize,
        #[arg(long = "m-min")]
        m_min: Option<String>,
        /// Constant to test against; a default is picked from the curves.
        #[arg(long)]
        bound: Option<String>,
        #[arg(long = "c-anchor", value_enum, default_value = "n-over-k")]
        c_anchor: AnchorFlag,
    },
    /// Check decodability and demand privacy.
    Verify {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeFlag,
        /// Comma-separated users; all singletons when omitted.
        #[arg(long)]
        coalition: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        #[arg(long, value_enum)]
        baseline: Option<Baseline>,
        /// Keep payload and cache bits in the views (exact mode).
        #[arg(long)]
        paranoid: bool,
    },
}

fn env_u64(name: &str) -> Option<u64> {
    std::env::var(name).ok()?.parse().ok()
}

fn default_seed() -> u64 {
    env_u64("D2D_SEED").unwrap_or(0)
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| {
            x.trim().parse().map_err(|_| {
                Error::params(format!(
                    "expected a comma-separated list of integers, got {s:?}"
                ))
            })
        })
        .collect()
}

fn build_scheme(args: &SchemeArgs, b_target: u64) -> Result<Scheme> {
    let base = SystemParams::new(args.k, args.n, 1, args.seed.unwrap_or_else(default_seed))?;
    let scheme = match args.scheme {
        SchemeKind::A => {
            let t = args
                .t
                .ok_or_else(|| Error::params("--scheme A needs --t"))?;
            Scheme::A(SchemeAParams::new(base, t)?)
        }
        SchemeKind::B => {
            let tp = args
                .tprime
                .ok_or_else(|| Error::params("--scheme B needs --tprime"))?;
            if tp == args.n {
                Scheme::B(SchemeBParams::full_memory(base)?)
            } else {
                Scheme::B(SchemeBParams::new(base, tp)?)
            }
        }
    };
    Ok(scheme.fit_file_bits(b_target))
}

fn anchor(flag: AnchorFlag) -> CAnchor {
    match flag {
        AnchorFlag::NOverK => CAnchor::NOverK,
        AnchorFlag::KOverN => CAnchor::KOverN,
    }
}

/// The selected curve for `(K, N)`.
pub fn curve_for(
    kind: CurveKind,
    k: usize,
    n: usize,
    c_anchor: CAnchor,
    factor: &Rational,
) -> Result<TradeoffCurve> {
    SystemParams::new(k, n, 1, 0)?;
    let need_two = |what: &str| {
        if k != 2 {
            Err(Error::Undefined(format!(
                "{what} is defined for K = 2 only, got K={k}"
            )))
        } else {
            Ok(())
        }
    };
    Ok(match kind {
        CurveKind::SchemeA => bounds::scheme_a_curve(k, n),
        CurveKind::SchemeB => {
            need_two("schemeB")?;
            bounds::scheme_b_curve(n)
        }
        CurveKind::SchemeC => bounds::scheme_c_curve(k, n, c_anchor),
        CurveKind::Conv2u => {
            need_two("conv2u")?;
            bounds::converse_two_user_curve(n)
        }
        CurveKind::ConvKu => bounds::converse_k_user_curve(k, n)?,
        CurveKind::SharedLink => bounds::shared_link_nonprivate_envelope(k, n, factor),
        CurveKind::SharedLinkUncoded => bounds::shared_link_uncoded(k, n),
    })
}

fn provenance_at(kind: CurveKind, k: usize, n: usize, m: &Rational, corner: bool) -> String {
    let tag = match kind {
        CurveKind::Conv2u => bounds::converse_two_user_detail(n, m)
            .map(|b| b.provenance.to_string())
            .ok(),
        CurveKind::ConvKu => bounds::converse_k_user_detail(k, n, m)
            .map(|b| b.provenance.to_string())
            .ok(),
        CurveKind::SharedLink => Some("shared-link-nonprivate".to_string()),
        _ => None,
    };
    match (tag, corner) {
        (Some(t), true) => format!("corner;{t}"),
        (Some(t), false) => t,
        (None, true) => "corner".to_string(),
        (None, false) => "grid".to_string(),
    }
}

/// CSV rows for a curve: every corner plus `grid + 1` even points.
pub fn curve_csv(
    kind: CurveKind,
    k: usize,
    n: usize,
    c_anchor: CAnchor,
    factor: &Rational,
    grid: usize,
) -> Result<String> {
    let curve = curve_for(kind, k, n, c_anchor, factor)?;
    let (lo, hi) = curve.domain();
    let mut rows: Vec<(Rational, bool)> = curve
        .corners()
        .iter()
        .map(|(m, _)| (m.clone(), true))
        .collect();
    rows.extend(even_grid(&lo, &hi, grid).into_iter().map(|m| (m, false)));
    // corners sort ahead of grid points at the same memory, then duplicates go
    rows.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    rows.dedup_by(|later, earlier| later.0 == earlier.0);
    let mut out = String::from("M_rational,M_decimal,R_rational,R_decimal,curve,provenance\n");
    for (m, corner) in rows {
        let r = curve.eval(&m)?;
        let prov = if kind.is_converse() || corner {
            provenance_at(kind, k, n, &m, corner)
        } else {
            "grid".to_string()
        };
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_rational(&m),
            fmt_decimal(&m, 12),
            fmt_rational(&r),
            fmt_decimal(&r, 12),
            kind.name(),
            prov
        )
        .expect("write to string");
    }
    Ok(out)
}

fn parse_converse(
    list: &str,
    k: usize,
    n: usize,
    c_anchor: CAnchor,
) -> Result<(TradeoffCurve, Vec<CurveKind>)> {
    let mut acc: Option<TradeoffCurve> = None;
    let mut kinds = Vec::new();
    for part in list.split(',') {
        let (name, div) = match part.trim().split_once('/') {
            Some((a, d)) => (a, parse_rational(d)?),
            None => (part.trim(), rat(1, 1)),
        };
        let kind = CurveKind::from_str(name, false)
            .map_err(|_| Error::params(format!("unknown curve {name:?}")))?;
        let c = curve_for(kind, k, n, c_anchor, &rat(1, 1))?.scale(&(rat(1, 1) / div));
        kinds.push(kind);
        acc = Some(match acc {
            None => c,
            Some(prev) => prev.pointwise_max(&c)?,
        });
    }
    Ok((
        acc.ok_or(Error::EmptyInput("no converse curve given"))?,
        kinds,
    ))
}

fn default_bound(achievable: CurveKind, converse: &[CurveKind], k: usize, n: usize) -> Rational {
    match (achievable, converse) {
        (CurveKind::SchemeB, _) => rat(3, 1),
        (_, c) if c.contains(&CurveKind::ConvKu) => rat(18, 1),
        _ if n >= k => rat(6, 1),
        _ => rat(12, 1),
    }
}

fn write_out(path: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Error::params(format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::params(format!("cannot write output: {e}"))),
    }
}

/// Executes one command, writing its report to `out`. Returns whether every
/// requested check passed.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<bool> {
    let mut report = String::new();
    let pass = match cli.command {
        Command::Simulate {
            scheme,
            demands,
            b_target,
            out: path,
        } => {
            let s = build_scheme(&scheme, b_target)?;
            let d = DemandVector::new(parse_list(&demands)?, s.params())?;
            let t = sim::run_protocol(&s, &d)?;
            let measured = sim::measure_load(&t);
            let (m, r) = s.point();
            let decoded = verify::check_decodability(&t)?;
            let ok = measured == r && decoded.iter().all(|&x| x);
            writeln!(
                report,
                "scheme {} K={} N={} B={}",
                t.scheme, t.params.users, t.params.files, t.params.file_bits
            )
            .ok();
            writeln!(
                report,
                "memory {} (cache bits per user {})",
                fmt_rational(&m),
                t.cache(1).total_bits()
            )
            .ok();
            writeln!(
                report,
                "load measured {} theoretical {}",
                fmt_rational(&measured),
                fmt_rational(&r)
            )
            .ok();
            writeln!(
                report,
                "messages {} payload_bits {} metadata_bytes {}",
                t.message_count(),
                t.payload_bits,
                t.metadata_bytes()
            )
            .ok();
            writeln!(report, "decoded {decoded:?}").ok();
            writeln!(report, "{}", if ok { "PASS" } else { "FAIL" }).ok();
            if let Some(p) = path {
                write_out(&Some(p), &t.to_text(), out)?;
            }
            ok
        }
        Command::Curve {
            k,
            n,
            which,
            c_anchor,
            factor,
            grid,
            out: path,
        } => {
            let csv = curve_csv(
                which,
                k,
                n,
                anchor(c_anchor),
                &parse_rational(&factor)?,
                grid,
            )?;
            write_out(&path, &csv, out)?;
            true
        }
        Command::Gap {
            k,
            n,
            achievable,
            converse,
            grid_density,
            m_min,
            bound,
            c_anchor,
        } => {
            let a = curve_for(achievable, k, n, anchor(c_anchor), &rat(1, 1))?;
            let (c, kinds) = parse_converse(&converse, k, n, anchor(c_anchor))?;
            let m_min = m_min.as_deref().map(parse_rational).transpose()?;
            let g = bounds::gap_on_default_grid(&a, &c, m_min.as_ref(), grid_density)?;
            let bound = match bound {
                Some(b) => parse_rational(&b)?,
                None => default_bound(achievable, &kinds, k, n),
            };
            let ok = g.max_ratio <= bound;
            writeln!(
                report,
                "gap {} vs max({converse}) K={k} N={n}: max_ratio {} ({}) at M={} ({}) bound {} {}",
                achievable.name(),
                fmt_rational(&g.max_ratio),
                fmt_decimal(&g.max_ratio, 12),
                fmt_rational(&g.argmax),
                fmt_decimal(&g.argmax, 12),
                fmt_rational(&bound),
                if ok { "PASS" } else { "FAIL" }
            )
            .ok();
            if !g.skipped.is_empty() {
                let s: Vec<String> = g.skipped.iter().map(fmt_rational).collect();
                writeln!(
                    report,
                    "warning: converse is zero at M in {{{}}}, skipped",
                    s.join(", ")
                )
                .ok();
            }
            if achievable == CurveKind::SchemeB && kinds == [CurveKind::Conv2u] {
                writeln!(report, "note: numerics suggest the ratio stays below 4/3").ok();
            }
            ok
        }
        Command::Verify {
            scheme,
            mode,
            coalition,
            trials,
            tol,
            baseline,
            paranoid,
        } => {
            let mut s = build_scheme(&scheme, 1)?;
            if baseline.is_some() {
                s = match s {
                    Scheme::A(p) => Scheme::A(p.non_private()),
                    Scheme::B(_) => {
                        return Err(Error::params(
                            "the non-private baseline exists for scheme A only",
                        ))
                    }
                };
            }
            let coalitions = match coalition {
                Some(c) => vec![parse_list(&c)?],
                None => (1..=s.params().users).map(|u| vec![u]).collect(),
            };
            let mut all_ok = true;
            for c in coalitions {
                let r = match mode {
                    ModeFlag::Exact => {
                        let cap = env_u64("D2D_EXACT_CAP").unwrap_or(verify::DEFAULT_EXACT_CAP);
                        let scheme_for = if paranoid { s.fit_file_bits(1) } else { s };
                        verify::check_privacy_exact(&scheme_for, &c, ExactOptions { cap, paranoid })
                            .map_err(|e| match e {
                                Error::InstanceTooLarge { outcomes, cap } => {
                                    Error::InstanceTooLarge {
                                        outcomes: format!("{outcomes} (use --mode mc)"),
                                        cap,
                                    }
                                }
                                other => other,
                            })?
                    }
                    ModeFlag::Mc => verify::check_privacy_mc(&s, &c, trials, tol, s.params().seed)?,
                };
                all_ok &= r.pass;
                writeln!(
                    report,
                    "verify scheme {} K={} N={}: {r}",
                    s.tag(),
                    s.params().users,
                    s.params().files
                )
                .ok();
            }
            let demands = DemandVector::all(s.params());
            let decodable = demands.iter().all(|d| {
                sim::run_protocol(&s, d)
                    .and_then(|t| verify::check_decodability(&t))
                    .map(|v| v.iter().all(|&x| x))
                    .unwrap_or(false)
            });
            writeln!(
                report,
                "decodability over {} demand vectors: {}",
                demands.len(),
                if decodable { "PASS" } else { "FAIL" }
            )
            .ok();
            all_ok && decodable
        }
    };
    out.write_all(report.as_bytes())
        .map_err(|e| Error::params(format!("cannot write output: {e}")))?;
    Ok(pass)
}
