use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use resolvability::asymptotic::TwoStageCode;
use resolvability::singleshot::BOUND_TOL;
use resolvability::types::{build_typed_sets, enumerate_types};
use resolvability::{
    channel_output, codebook_output, mutual_information, product_channel, tv_distance, Budget, Codebook, Distribution,
};
use resolvability_harness::baseline::random_baseline;
use resolvability_harness::instance::{load_instance, InputSpec};
use resolvability_harness::sweep::{
    build_point, iid_input, run_sweep, support_setup, write_csv, Axis, ExperimentConfig, Mode, Params,
};

#[derive(Parser)]
#[command(name = "resolv", version, about = "Deterministic channel-resolvability codebooks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a codebook and write it in text form.
    Build {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "singleshot")]
        mode: Mode,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact total-variation distance of a codebook file.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        codebook: PathBuf,
    },
    /// Run a parameter sweep and write CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "singleshot")]
        mode: Mode,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        axis: Axis,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
        /// Adds random-coding baseline rows drawn with this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Adds a wall_time column (output then differs between runs).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the types of length n with their typical-set diagnostics.
    Types {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0.2)]
        alpha: f64,
        #[arg(long, default_value_t = 0.1)]
        tau: f64,
    },
    /// Random-coding baseline codebook and its exact distance.
    Baseline {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long = "L")]
        size: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Instance file (TOML, or JSON by extension), `bsc:<p>`, or `noiseless:<k>`.
    #[arg(long)]
    channel: String,
    /// `file`, `uniform`, or a comma-separated probability vector.
    #[arg(long, default_value = "file")]
    input: InputSpec,
    /// Largest number of states or matrix cells to enumerate.
    #[arg(long, default_value_t = Budget::DEFAULT.0)]
    budget: usize,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.25)]
    epsilon_prime: f64,
    #[arg(long, default_value_t = 0.1)]
    tau: f64,
    #[arg(long, default_value_t = 0.1)]
    tau_prime: f64,
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    #[arg(long, default_value_t = 0.05)]
    nu: f64,
    /// Codebook length (per type in general and iid modes).
    #[arg(long = "L")]
    size: Option<usize>,
    /// Type-code length.
    #[arg(long = "L-prime")]
    type_size: Option<usize>,
}

impl ParamArgs {
    fn params(&self) -> Params {
        Params {
            n: self.n,
            epsilon: self.epsilon,
            epsilon_prime: self.epsilon_prime,
            tau: self.tau,
            tau_prime: self.tau_prime,
            alpha: self.alpha,
            nu: self.nu,
            size: self.size,
            type_size: self.type_size,
        }
    }
}

fn write_out(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn build(common: Common, mode: Mode, params: Params, out: Option<PathBuf>) -> Result<()> {
    params.validate()?;
    let inst = load_instance(&common.channel)?;
    let p = inst.input(&common.input)?;
    let r = build_point(mode, &inst.channel, &p, &params, Budget(common.budget))?;
    write_out(out.as_ref(), &r.code)?;
    eprintln!(
        "mode {mode} n {} L {} tv {:.6e} bound {:.6e} d_max {:.6e} complement_mass {:.6e}",
        params.n, r.size, r.tv, r.bound, r.d_max, r.complement_mass
    );
    if r.tv.is_nan() || r.tv > r.bound + BOUND_TOL {
        bail!("measured distance {} exceeds bound {}", r.tv, r.bound);
    }
    Ok(())
}

fn eval(common: Common, n: usize, path: PathBuf) -> Result<()> {
    let budget = Budget(common.budget);
    let inst = load_instance(&common.channel)?;
    let p = inst.input(&common.input)?;
    let w = &inst.channel;
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let pn = iid_input(&p, n, budget)?;
    let wn = if n == 1 {
        w.clone()
    } else {
        product_channel(w, n, budget)?
    };
    let target = channel_output(&pn, &wn)?;
    let output = if text.starts_with("two_stage") {
        let code = TwoStageCode::from_text(w.input(), &text, budget)?;
        if code.n() != n {
            bail!("code has block length {} but --n is {n}", code.n());
        }
        code.output(w, budget)?
    } else {
        let c = Codebook::from_text(wn.input().clone(), &text)?;
        codebook_output(&c, &wn)?
    };
    println!("tv {:.12e}", tv_distance(&target, &output)?);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    common: Common,
    mode: Mode,
    params: Params,
    axis: Axis,
    values: Vec<f64>,
    seed: Option<u64>,
    jobs: Option<usize>,
    timing: bool,
    out: Option<PathBuf>,
) -> Result<()> {
    let config = ExperimentConfig {
        channel: common.channel,
        input: common.input,
        mode,
        params,
        seed,
        budget: Budget(common.budget),
        jobs,
        timing,
    };
    let rows = run_sweep(&config, axis, &values)?;
    let mut buf = Vec::new();
    write_csv(&mut buf, axis, &rows, timing)?;
    write_out(out.as_ref(), &String::from_utf8(buf)?)
}

fn types(common: Common, n: usize, alpha: f64, tau: f64) -> Result<()> {
    let budget = Budget(common.budget);
    let inst = load_instance(&common.channel)?;
    let w = &inst.channel;
    let p = inst.input(&common.input).ok();
    let seqs = w.input().power(n, budget)?;
    let mut text = String::from(
        "type,class_size,mass,mutual_information,typical_size,alpha_measured,beta_measured,complement_mass,d_max_bound\n",
    );
    for t in enumerate_types(w.input(), n)? {
        let cond = Distribution::uniform(seqs.subset(t.members(budget)?)?);
        let mass = p.as_ref().map(|p| {
            t.class_size() as f64
                * t.counts()
                    .iter()
                    .enumerate()
                    .map(|(a, &c)| p.get(a).powi(c as i32))
                    .product::<f64>()
        });
        let info = mutual_information(&t.freq(), w)?;
        let fmt = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.6e}"));
        match build_typed_sets(&t, &cond, w, alpha, tau, budget) {
            Ok(s) => writeln!(
                text,
                "\"{}\",{},{},{info:.6e},{},{:.6e},{:.6e},{:.6e},{:.6e}",
                t.label(),
                t.class_size(),
                fmt(mass),
                s.typical.len(),
                s.alpha_measured,
                s.beta_measured,
                s.complement_mass,
                s.d_max_bound()
            )?,
            Err(resolvability::Error::EmptyTypicalSet) => writeln!(
                text,
                "\"{}\",{},{},{info:.6e},0,,,,",
                t.label(),
                t.class_size(),
                fmt(mass)
            )?,
            Err(e) => return Err(e.into()),
        }
    }
    write_out(None, &text)
}

fn baseline(common: Common, n: usize, size: usize, seed: u64, out: Option<PathBuf>) -> Result<()> {
    let budget = Budget(common.budget);
    let inst = load_instance(&common.channel)?;
    let p = inst.input(&common.input)?;
    let pn = iid_input(&p, n, budget)?;
    let setup = support_setup(&inst.channel, &pn, budget)?;
    let b = random_baseline(&setup.input, &setup.channel, size, seed)?;
    if let Some(path) = &out {
        write_out(Some(path), &b.codebook.lift_to_parent()?.to_text())?;
    }
    println!("tv {:.12e}", b.tv);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build {
            common,
            mode,
            params,
            out,
        } => build(common, mode, params.params(), out),
        Command::Eval { common, n, codebook } => eval(common, n, codebook),
        Command::Sweep {
            common,
            mode,
            params,
            axis,
            values,
            seed,
            jobs,
            timing,
            out,
        } => sweep(common, mode, params.params(), axis, values, seed, jobs, timing, out),
        Command::Types { common, n, alpha, tau } => types(common, n, alpha, tau),
        Command::Baseline {
            common,
            n,
            size,
            seed,
            out,
        } => baseline(common, n, size, seed, out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        // A closed pipe (`resolv types ... | head`) is not a failure.
        Err(e)
            if e.chain().any(|c| {
                c.downcast_ref::<io::Error>()
                    .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
            }) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
