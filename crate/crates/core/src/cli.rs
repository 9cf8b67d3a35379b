//! Command-line front end. Exit codes: 0 all checks pass, 1 a check failed,
//! 2 usage or input error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::anderson::{
    anderson_ideal_comparisons, bpw_weighted, classical_rank_one, classical_weights, eam_generate, eam_reduce,
    embed_am, t7_generate, weights_from_blocks, CommutatorWitness, DRule, EpsRule, T7Config,
};
use crate::blockmat::io::{matrix_to_csv, read_matrix};
use crate::blockmat::BlockSizes;
use crate::density::{
    curve_csv, density_curve, staircase_density_limit, zero_density_permutation, DensityPoint,
    MatrixForm,
};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, op_norm, random_complex, Mat};
use crate::obstruction::{
    anderson_obstruction_check, counterexample_sequence, diag_omega_check, growth_classify, ratio_curve,
};
use crate::report::{Check, Report};
use crate::seqcalc::{dfww_test, dominated_by, intersection_witness, monotonize, RealSeq};
use crate::staircase::{
    collapsing_residual, commutator_form, derive_basis, e_inclusion_residuals, simultaneous_tridiagonalize,
    transform, verify_staircase, SupportProfile,
};
use crate::tol::Tolerances;

#[derive(Debug, Parser)]
#[command(name = "opcommute", version, about = "Finite commutator witnesses, staircase forms and support densities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate and verify a block commutator witness.
    #[command(subcommand)]
    Anderson(AndersonCmd),
    /// Derive a staircase or block tridiagonal basis for matrices.
    Tridiag(TridiagArgs),
    /// Support density curve of a matrix form.
    Density(DensityArgs),
    /// Partial-trace and growth diagnostics.
    #[command(subcommand)]
    Obstruct(ObstructCmd),
    /// Sequence diagnostics.
    #[command(subcommand)]
    Seq(SeqCmd),
}

#[derive(Debug, Args)]
pub struct WitnessOut {
    /// Write the witness bundle as JSON.
    #[arg(short = 'o', long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum AndersonCmd {
    /// Rank-one projection as a commutator on arithmetic blocks.
    Classical {
        #[arg(long, default_value_t = 30)]
        levels: usize,
        #[command(flatten)]
        out: WitnessOut,
    },
    /// Weighted classical model with targets `d_n / n`.
    Bpw {
        #[arg(long, default_value_t = 30)]
        levels: usize,
        /// inv, inv-sqrt, geometric, const, or a CSV file.
        #[arg(long, default_value = "inv")]
        d: String,
        #[command(flatten)]
        out: WitnessOut,
    },
    /// Strictly positive diagonal commutator.
    T7 {
        #[arg(long, default_value_t = 25)]
        levels: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = RuleArg::Midpoint)]
        rule: RuleArg,
        #[arg(long = "L", default_value_t = 0.5)]
        l: f64,
        #[arg(long = "M", default_value_t = 0.75)]
        growth: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha1: f64,
        /// Explicit `ε_1, ε_2, ...`.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        /// JSON configuration; replaces the flags above.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        out: WitnessOut,
    },
    /// Exponential-size embedding of an arithmetic witness.
    Eam {
        #[arg(long, value_enum, default_value_t = InnerArg::Classical)]
        inner: InnerArg,
        #[arg(long, default_value_t = 8)]
        levels: usize,
        /// pow2, pow2m1, 2x3n, 4x5n, 6x7n.
        #[arg(long, default_value = "pow2")]
        sizes: String,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: WitnessOut,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Midpoint,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InnerArg {
    Classical,
    T7,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Classic,
    T3aa,
    Symmetric,
    Cyclic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WordsArg {
    /// Each input contributes `T` and `T*`.
    Adjoint,
    /// Each input contributes `T` only.
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Staircase,
    Block,
}

#[derive(Debug, Args)]
pub struct TridiagArgs {
    /// Matrix file (CSV or JSON); repeat for several operators.
    #[arg(long)]
    pub input: Vec<PathBuf>,
    /// Use one random complex matrix of this dimension instead of files.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ProfileArg::Classic)]
    pub profile: ProfileArg,
    #[arg(long, value_enum, default_value_t = WordsArg::Adjoint)]
    pub words: WordsArg,
    #[arg(long, value_enum, default_value_t = FormArg::Staircase)]
    pub form: FormArg,
    /// With `--form block` and two inputs, also check `[C, Z]` at block bandwidth 2.
    #[arg(long)]
    pub commutator: bool,
    /// Basis length; defaults to the dimension.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Linear dependence gate.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// diagonal, tridiagonal, upper, hessenberg, am, staircase3n, classic-staircase,
    /// t3aa-staircase, symmetric-staircase, cyclic-staircase, block, t3aa-block,
    /// permuted-staircase3n.
    #[arg(long)]
    pub form: String,
    #[arg(long = "N", value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Levels of the `2·3^{n−2}` sizes for block forms.
    #[arg(long, default_value_t = 8)]
    pub levels: usize,
    /// Emit a JSON report instead of CSV.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SizesArgs {
    /// arithmetic, 2x3n, 4x5n, 6x7n, pow2m1, pow2.
    #[arg(long, default_value = "arithmetic")]
    pub sizes: String,
    #[arg(long, default_value_t = 20)]
    pub levels: usize,
}

#[derive(Debug, Subcommand)]
pub enum ObstructCmd {
    /// `(d_1 + ... + d_{s_n}) / k_n` per level.
    Ratio {
        #[arg(long, default_value = "inv-sqrt")]
        d: String,
        #[command(flatten)]
        sizes: SizesArgs,
        #[arg(long)]
        json: bool,
    },
    /// Ratio curve on arithmetic blocks with the positive-limsup verdict.
    Anderson {
        #[arg(long, default_value = "inv-sqrt")]
        d: String,
        #[arg(long, default_value_t = 100)]
        levels: usize,
        #[arg(long)]
        json: bool,
    },
    /// Block-size growth classification.
    Growth {
        #[command(flatten)]
        sizes: SizesArgs,
        #[arg(long)]
        json: bool,
    },
    /// Diagonal sequence with a ratio curve bounded below on a subsequence.
    Counterexample {
        #[command(flatten)]
        sizes: SizesArgs,
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
        #[arg(long)]
        json: bool,
    },
    /// `s_n (‖A_n‖ + ‖B_n‖)` for one operator of a witness bundle.
    DiagOmega {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = OperatorArg::C)]
        operator: OperatorArg,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorArg {
    #[value(name = "C")]
    C,
    #[value(name = "Z")]
    Z,
}

#[derive(Debug, Subcommand)]
pub enum SeqCmd {
    /// `(|λ_1| + ... + |λ_n|) / (n μ_n)`.
    Dfww {
        #[arg(long)]
        lambda: PathBuf,
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Search `k ≤ k_max` with `s_n ≤ M · D_k(t)_n` on the prefix.
    Dominate {
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        t: PathBuf,
        #[arg(long, default_value_t = 8)]
        k_max: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run-length witness for `c ∧ z` across blocks.
    Intersect {
        #[arg(long, default_value_t = 6)]
        blocks: usize,
    },
    /// Comparisons between `c⋆` and the harmonic model sequence.
    Ideal {
        #[arg(long, default_value_t = 1000)]
        len: usize,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    let tol = match Tolerances::from_env() {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    match execute(cli.command, &tol, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn execute(cmd: Command, tol: &Tolerances, out: &mut dyn Write) -> Result<bool> {
    match cmd {
        Command::Anderson(a) => cmd_anderson(a, tol, out),
        Command::Tridiag(a) => cmd_tridiag(a, tol, out),
        Command::Density(a) => cmd_density(a, tol, out),
        Command::Obstruct(a) => cmd_obstruct(a, tol, out),
        Command::Seq(a) => cmd_seq(a, tol, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn finish(report: &Report, out: &mut dyn Write) -> Result<bool> {
    emit(out, &report.to_json()?)?;
    Ok(report.passed())
}

/// Named sequences `d_n` for `n = 1..len`, or a CSV file.
pub fn named_sequence(name: &str, len: usize) -> Result<RealSeq> {
    let f: fn(f64) -> f64 = match name {
        "inv" => |n| 1.0 / n,
        "inv-sqrt" => |n| 1.0 / n.sqrt(),
        "geometric" => |n| 0.5f64.powf(n),
        "const" => |_| 1.0,
        path => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::InvalidArgument(format!("unknown sequence {path:?}: {e}")))?;
            let s = RealSeq::from_csv(&text)?;
            if s.len() < len {
                return Err(Error::InvalidArgument(format!("{path} has {} terms, need {len}", s.len())));
            }
            return Ok(s.prefix(len));
        }
    };
    RealSeq::from_fn(len, |n| f(n as f64))
}

/// Named block size families with `levels` levels.
pub fn named_sizes(name: &str, levels: usize) -> Result<BlockSizes> {
    if levels == 0 {
        return Err(Error::InvalidArgument("levels must be positive".into()));
    }
    match name {
        "arithmetic" => Ok(BlockSizes::arithmetic(levels)),
        "2x3n" => BlockSizes::geometric_cover(3, levels),
        "4x5n" => BlockSizes::geometric_cover(5, levels),
        "6x7n" => BlockSizes::geometric_cover(7, levels),
        "pow2m1" => BlockSizes::pow2_minus_one(levels),
        "pow2" => BlockSizes::pow2(levels),
        other => Err(Error::InvalidArgument(format!("unknown sizes {other:?}"))),
    }
}

/// Matrix forms by name; block forms use `2·3^{n−2}` sizes over `levels` levels.
pub fn named_form(name: &str, levels: usize) -> Result<MatrixForm> {
    Ok(match name {
        "diagonal" => MatrixForm::Diagonal,
        "tridiagonal" => MatrixForm::Tridiagonal,
        "upper" => MatrixForm::Upper,
        "hessenberg" => MatrixForm::Hessenberg,
        "am" => MatrixForm::AndersonModel,
        "staircase3n" | "permuted-staircase3n" => MatrixForm::Staircase { c1: 3, c2: 3 },
        "classic-staircase" => MatrixForm::ProfileStaircase(SupportProfile::classic_one_op()),
        "t3aa-staircase" => MatrixForm::ProfileStaircase(SupportProfile::T3aa),
        "symmetric-staircase" => MatrixForm::ProfileStaircase(SupportProfile::Symmetric),
        "cyclic-staircase" => MatrixForm::ProfileStaircase(SupportProfile::Cyclic),
        "block" => MatrixForm::BlockTridiagonal(BlockSizes::geometric_cover(3, levels)?),
        "t3aa-block" => MatrixForm::T3aaBlock(BlockSizes::geometric_cover(3, levels)?),
        other => return Err(Error::InvalidArgument(format!("unknown form {other:?}"))),
    })
}

fn witness_scale(w: &CommutatorWitness) -> f64 {
    (max_abs(&w.c.assemble()) * max_abs(&w.z.assemble())).max(1.0)
}

fn witness_checks(report: &mut Report, w: &CommutatorWitness, tol: &Tolerances) -> Result<()> {
    let bound = tol.residual * witness_scale(w);
    let r = w.residuals()?;
    report.check(Check::at_most("max_residual", r.max_residual, bound));
    report.check(Check::at_most("leading_principal_error", w.leading_principal_error(), bound));
    report.insert("max_residual", r.max_residual)?;
    report.insert("residuals", &r)?;
    Ok(())
}

fn save_witness(w: &CommutatorWitness, out: &WitnessOut) -> Result<()> {
    if let Some(path) = &out.out {
        fs::write(path, serde_json::to_string(w)? + "\n")?;
    }
    Ok(())
}

fn cmd_anderson(cmd: AndersonCmd, tol: &Tolerances, out: &mut dyn Write) -> Result<bool> {
    match cmd {
        AndersonCmd::Classical { levels, out: o } => {
            let w = classical_rank_one(levels)?;
            let mut report = Report::new("anderson classical", None, *tol);
            report.insert("levels", levels)?;
            witness_checks(&mut report, &w, tol)?;
            save_witness(&w, &o)?;
            finish(&report, out)
        }
        AndersonCmd::Bpw { levels, d, out: o } => {
            let seq = named_sequence(&d, levels)?;
            let w = bpw_weighted(&seq, levels)?;
            let mut report = Report::new("anderson bpw", None, *tol);
            report.insert("levels", levels)?;
            report.insert("d", &d)?;
            witness_checks(&mut report, &w, tol)?;
            save_witness(&w, &o)?;
            finish(&report, out)
        }
        AndersonCmd::T7 { levels, seed, rule, l, growth, alpha1, eps, config, out: o } => {
            let cfg = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path)?;
                    serde_json::from_str::<T7Config>(&text).map_err(|e| Error::Config(e.to_string()))?
                }
                None => T7Config {
                    eps: eps.map_or(EpsRule::Default, EpsRule::Explicit),
                    l,
                    growth,
                    alpha1,
                    d_rule: match rule {
                        RuleArg::Midpoint => DRule::Midpoint,
                        RuleArg::Uniform => DRule::SeededUniform { seed: seed.unwrap_or(0) },
                    },
                    levels,
                },
            };
            let seed = match cfg.d_rule {
                DRule::SeededUniform { seed } => Some(seed),
                DRule::Midpoint => None,
            };
            let t = t7_generate(&cfg)?;
            let mut report = Report::new("anderson t7", seed, *tol);
            report.insert("config", &cfg)?;
            witness_checks(&mut report, &t.witness, tol)?;
            report.check(Check::flag("all_positive", t.all_positive));
            report.check(Check::flag("interval_ok", t.interval_ok));
            report.check(Check::at_most(
                "offdiag_identity_max",
                t.offdiag_identity_max,
                tol.residual * witness_scale(&t.witness),
            ));
            if seed.is_some() && t.eps_distinct {
                report.check(Check::flag("distinct_entries", t.distinct_entries));
            }
            report.insert("distinct_entries", t.distinct_entries)?;
            report.insert("redraws", t.redraws)?;
            report.insert("d", &t.d)?;
            report.insert("min_entry", t.d_kn.iter().flatten().copied().fold(f64::INFINITY, f64::min))?;
            save_witness(&t.witness, &o)?;
            finish(&report, out)
        }
        AndersonCmd::Eam { inner, levels, sizes, seed, out: o } => {
            let base = match inner {
                InnerArg::Classical => {
                    let mut w = classical_rank_one(levels)?;
                    // the induced targets keep every level consistent with the truncation
                    w.d_blocks = crate::anderson::induced_targets(&w.c, &w.z);
                    w
                }
                InnerArg::T7 => {
                    let cfg = T7Config {
                        levels,
                        d_rule: seed.map_or(DRule::Midpoint, |s| DRule::SeededUniform { seed: s }),
                        ..T7Config::default()
                    };
                    t7_generate(&cfg)?.witness
                }
            };
            let big = named_sizes(&sizes, levels)?;
            let embedded = embed_am(&base, &big)?;
            let reduced = eam_reduce(&embedded, levels)?;
            let mut report = Report::new("anderson eam", seed, *tol);
            report.insert("sizes", big.sizes())?;
            witness_checks(&mut report, &embedded, tol)?;
            let gam = embedded.gam_residuals()?;
            report.check(Check::at_most("gam_band", gam.max_band, tol.residual * witness_scale(&embedded)));
            let same = reduced.c == base.c && reduced.z == base.z && reduced.d_blocks == base.d_blocks;
            report.check(Check::flag("reduce_recovers_inner", same));
            let regenerated = eam_generate(&weights_from_blocks(&base.c, &base.z, |n| n), &big, None)?;
            report.insert("induced_targets_match", regenerated.d_blocks == embedded.d_blocks)?;
            report.insert("classical_levels", classical_weights(levels.saturating_sub(1)).levels())?;
            save_witness(&embedded, &o)?;
            finish(&report, out)
        }
    }
}

fn profile_of(arg: ProfileArg, slots: usize) -> Result<SupportProfile> {
    let p = match arg {
        ProfileArg::Classic => SupportProfile::Classic { slots },
        ProfileArg::T3aa => SupportProfile::T3aa,
        ProfileArg::Symmetric => SupportProfile::Symmetric,
        ProfileArg::Cyclic => SupportProfile::Cyclic,
    };
    if p.slots() != slots {
        return Err(Error::InvalidArgument(format!(
            "profile {} has {} slots but the words give {slots} operators",
            p.name(),
            p.slots()
        )));
    }
    Ok(p)
}

fn load_inputs(args: &TridiagArgs) -> Result<Vec<Mat>> {
    let mats: Vec<Mat> = match args.random {
        Some(n) if args.input.is_empty() => {
            if n == 0 {
                return Err(Error::InvalidArgument("dimension must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            vec![random_complex(n, n, &mut rng)]
        }
        Some(_) => return Err(Error::InvalidArgument("use either --input or --random".into())),
        None => args.input.iter().map(|p| read_matrix(p)).collect::<Result<_>>()?,
    };
    let Some(first) = mats.first() else {
        return Err(Error::InvalidArgument("need at least one --input".into()));
    };
    let n = first.nrows();
    if mats.iter().any(|m| m.shape() != (n, n)) {
        return Err(Error::InvalidArgument("inputs must be square of equal dimension".into()));
    }
    Ok(mats)
}

fn write_csv(dir: &Path, name: &str, m: &Mat) -> Result<()> {
    fs::write(dir.join(name), matrix_to_csv(m))?;
    Ok(())
}

fn cmd_tridiag(args: TridiagArgs, tol: &Tolerances, out: &mut dyn Write) -> Result<bool> {
    let mats = load_inputs(&args)?;
    let n = mats[0].nrows();
    let k = args.k.unwrap_or(n);
    let gate = args.tol.unwrap_or(tol.dependence);
    let mut report = Report::new("tridiag", args.random.map(|_| args.seed), *tol);
    report.insert("dim", n)?;
    report.insert("K", k)?;
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir)?;
    }
    match args.form {
        FormArg::Staircase => {
            let ops: Vec<Mat> = match args.words {
                WordsArg::Adjoint => mats.iter().flat_map(|t| [t.clone(), t.adjoint()]).collect(),
                WordsArg::Plain => mats.clone(),
            };
            let profile = profile_of(args.profile, ops.len())?;
            let basis = derive_basis(&ops, None, &profile, k, gate)?;
            report.insert("profile", profile.name())?;
            report.insert("basis_len", basis.len())?;
            report.insert("truncated", basis.truncated)?;
            report.insert("basis_is_identity", basis.len() == n && basis.f == Mat::identity(n, n))?;
            let r = |slot: usize| {
                let p = profile.clone();
                move |j: usize| p.r(slot, j).unwrap_or(usize::MAX)
            };
            let mut checks = Vec::new();
            for (i, t) in mats.iter().enumerate() {
                let tf = transform(t, &basis)?;
                let scale = op_norm(t).max(f64::MIN_POSITIVE);
                let check = match args.words {
                    WordsArg::Adjoint => verify_staircase(&tf, r(2 * i + 1), r(2 * i + 2), tol.rel * scale),
                    WordsArg::Plain => verify_staircase(&tf, r(i + 1), |_| usize::MAX, tol.rel * scale),
                };
                report.check(Check::flag(format!("staircase_{}", i + 1), check.ok));
                checks.push(check);
                if let Some(dir) = &args.out_dir {
                    write_csv(dir, &format!("op{}.csv", i + 1), &tf)?;
                }
            }
            report.insert("staircase", &checks)?;
            let incl = e_inclusion_residuals(&basis, &profile, None).into_iter().fold(0.0, f64::max);
            report.check(Check::at_most("e_inclusion", incl, tol.rel.max(gate)));
            let collapse = collapsing_residual(&ops, &basis, &profile);
            report.check(Check::at_most("collapsing", collapse, tol.rel.max(gate)));
            report.insert("g_log", &basis.g_log)?;
            if let Some(dir) = &args.out_dir {
                write_csv(dir, "basis.csv", &basis.f)?;
            }
        }
        FormArg::Block => {
            let (form, extra) = if args.commutator {
                if mats.len() != 2 {
                    return Err(Error::InvalidArgument("--commutator needs exactly two inputs".into()));
                }
                let d = &mats[0] * &mats[1] - &mats[1] * &mats[0];
                let scale = op_norm(&d).max(f64::MIN_POSITIVE);
                let (form, cf) = commutator_form(&mats[0], &mats[1], &d, k, gate, tol.rel * scale)?;
                (form, Some(cf))
            } else {
                let scale = mats.iter().map(op_norm).fold(f64::MIN_POSITIVE, f64::max);
                (simultaneous_tridiagonalize(&mats, k, gate, tol.rel * scale)?, None)
            };
            report.insert("sizes", form.sizes.sizes())?;
            report.insert("basis_len", form.basis.len())?;
            for (i, b) in form.band_checks.iter().enumerate() {
                report.check(Check::flag(format!("block_tridiagonal_{}", i + 1), b.ok));
            }
            report.insert("band_checks", &form.band_checks)?;
            if let Some(cf) = extra {
                report.check(Check::flag("commutator_bandwidth_2", cf.d_band.ok));
                report.insert("commutator_band", &cf.d_band)?;
            }
            if let Some(dir) = &args.out_dir {
                write_csv(dir, "basis.csv", &form.basis.f)?;
                for (i, t) in form.transformed.iter().enumerate() {
                    write_csv(dir, &format!("op{}.csv", i + 1), t)?;
                }
            }
        }
    }
    if let Some(dir) = &args.out_dir {
        fs::write(dir.join("report.json"), report.to_json()?)?;
    }
    finish(&report, out)
}

fn cmd_density(args: DensityArgs, tol: &Tolerances, out: &mut dyn Write) -> Result<bool> {
    if args.n.contains(&0) {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let form = named_form(&args.form, args.levels)?;
    let mut report = Report::new("density", None, *tol);
    report.insert("form", &args.form)?;
    let points: Vec<DensityPoint> = if args.form == "permuted-staircase3n" {
        let mut pts = Vec::new();
        for &n in &args.n {
            let p = zero_density_permutation(&form, n.max(2), 1 << 20)?;
            report.check(Check::flag(format!("permutation_bound_N{n}"), p.bound_ok));
            report.check(Check::flag(format!("compression_diagonal_N{n}"), p.compression_diagonal));
            pts.push(DensityPoint { n, l: p.permuted_count, d: p.density_after });
        }
        pts
    } else {
        density_curve(&form, &args.n)?
    };
    if let MatrixForm::ProfileStaircase(profile) = &form {
        let lim = staircase_density_limit(profile, &args.n)?;
        report.check(Check::flag("delta_recursion", lim.delta_ok));
        report.check(Check::flag("closed_form", lim.closed_form_ok));
        report.check(Check::flag("sandwich", lim.sandwich_ok));
        report.insert("expected", lim.expected)?;
    }
    if args.json {
        report.insert("curve", &points)?;
        finish(&report, out)
    } else {
        emit(out, &curve_csv(&points))?;
        Ok(report.passed())
    }
}

fn curve_output(report: &mut Report, curve: &RealSeq, json: bool, out: &mut dyn Write) -> Result<bool> {
    if json {
        report.insert("curve", curve.values())?;
        finish(report, out)
    } else {
        emit(out, &crate::obstruction::curve_csv(curve))?;
        Ok(report.passed())
    }
}

fn cmd_obstruct(cmd: ObstructCmd, tol: &Tolerances, out: &mut dyn Write) -> Result<bool> {
    match cmd {
        ObstructCmd::Ratio { d, sizes, json } => {
            let s = named_sizes(&sizes.sizes, sizes.levels)?;
            let seq = named_sequence(&d, s.dim())?;
            let curve = ratio_curve(&seq, &s)?;
            let mut report = Report::new("obstruct ratio", None, *tol);
            curve_output(&mut report, &curve, json, out)
        }
        ObstructCmd::Anderson { d, levels, json } => {
            let seq = named_sequence(&d, levels * (levels + 1) / 2)?;
            let v = anderson_obstruction_check(&seq, levels)?;
            let mut report = Report::new("obstruct anderson", None, *tol);
            report.insert("positive_limsup_estimate", v.positive_limsup_estimate)?;
            curve_output(&mut report, &v.curve, json, out)
        }
        ObstructCmd::Growth { sizes, json } => {
            let s = named_sizes(&sizes.sizes, sizes.levels)?;
            let g = growth_classify(&s)?;
            let mut report = Report::new("obstruct growth", None, *tol);
            report.check(Check::flag("certificate", g.certificate_ok));
            report.insert("rho", g.rho)?;
            report.insert("liminf_est", g.liminf_est)?;
            report.insert("omega_exponential", g.omega_exponential)?;
            let curve = RealSeq::new(g.ratios.clone())?;
            if json {
                report.insert("ratios", &g.ratios)?;
                finish(&report, out)
            } else {
                emit(out, &crate::obstruction::curve_csv(&curve))?;
                Ok(report.passed())
            }
        }
        ObstructCmd::Counterexample { sizes, budget, json } => {
            let s = named_sizes(&sizes.sizes, sizes.levels)?;
            let c = counterexample_sequence(&s, budget)?;
            let mut report = Report::new("obstruct counterexample", None, *tol);
            report.check(Check::flag("monotone", c.d.is_monotone()));
            report.insert("certified", &c.certified)?;
            curve_output(&mut report, &c.d, json, out)
        }
        ObstructCmd::DiagOmega { input, operator, json } => {
            let w: CommutatorWitness = serde_json::from_str(&fs::read_to_string(&input)?)?;
            let bt = match operator {
                OperatorArg::C => &w.c,
                OperatorArg::Z => &w.z,
            };
            let r = diag_omega_check(bt, tol.stabilize)?;
            let mut report = Report::new("obstruct diag-omega", w.provenance.seed, *tol);
            report.check(Check::flag("bound_holds", r.bound_holds));
            report.insert("bounded_M", r.bounded_m)?;
            report.insert("bounded_estimate", r.bounded_estimate)?;
            curve_output(&mut report, &RealSeq::new(r.curve)?, json, out)
        }
    }
}

fn read_seq(path: &Path) -> Result<RealSeq> {
    RealSeq::from_csv(&fs::read_to_string(path)?)
}

fn cmd_seq(cmd: SeqCmd, tol: &Tolerances, out: &mut dyn Write) -> Result<bool> {
    match cmd {
        SeqCmd::Dfww { lambda, mu, json } => {
            let l = read_seq(&lambda)?;
            let abs = RealSeq::new(l.values().iter().map(|v| v.abs()).collect())?;
            let r = dfww_test(&abs, &read_seq(&mu)?, tol.stabilize)?;
            let mut report = Report::new("seq dfww", None, *tol);
            report.insert("bounded_estimate", r.bounded_estimate)?;
            curve_output(&mut report, &RealSeq::new(r.ratio_curve)?, json, out)
        }
        SeqCmd::Dominate { s, t, k_max, json } => {
            let s = monotonize(&read_seq(&s)?);
            let t = monotonize(&read_seq(&t)?);
            let d = dominated_by(&s, &t, k_max, tol.stabilize)?;
            let mut report = Report::new("seq dominate", None, *tol);
            report.insert("found", d.found)?;
            report.insert("k", d.k)?;
            report.insert("M", d.m)?;
            curve_output(&mut report, &RealSeq::new(d.curve)?, json, out)
        }
        SeqCmd::Intersect { blocks } => {
            let w = intersection_witness(blocks)?;
            let mut report = Report::new("seq intersect", None, *tol);
            report.insert("witness", &w)?;
            report.insert("c_and_z", w.c_and_z())?;
            finish(&report, out)
        }
        SeqCmd::Ideal { len } => {
            let mut report = Report::new("seq ideal", None, *tol);
            let cmp = anderson_ideal_comparisons(len);
            for c in &cmp {
                report.check(Check::flag(c.name.clone(), c.holds));
            }
            report.insert("comparisons", &cmp)?;
            finish(&report, out)
        }
    }
}
