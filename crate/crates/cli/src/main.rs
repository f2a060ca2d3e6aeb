use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use polarss::access::{self, Coalition, Mode};
use polarss::construction::{self, build_code, dual_submatrix, generator_submatrix, CodeSpec};
use polarss::format::{self, SharesFile};
use polarss::sharing::{self, Dealing, Share, ShareBundle};
use polarss::transmission;
use polarss::{BitVector, ChannelModel};

/// Polar-code secret sharing toolkit.
#[derive(Parser)]
#[command(name = "polarss", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code and write it as a code file.
    Construct(ConstructArgs),
    /// Show a code's parameters and matrices.
    Inspect(CodeArg),
    /// Print the column weights of G_N.
    Weights {
        /// Kernel exponent (N = 2^n).
        #[arg(long)]
        n: u32,
    },
    /// List minimal access sets.
    Access(AccessArgs),
    /// Share a secret bit string.
    Deal(DealArgs),
    /// Recover a secret from shares.
    Reconstruct(ReconstructArgs),
    /// Monte-Carlo share delivery over the code's channel.
    Simulate(SimulateArgs),
    /// Exhaustive secrecy audit of one coalition.
    Audit(AuditArgs),
}

#[derive(Args)]
struct CodeArg {
    /// Code file.
    #[arg(long)]
    code: PathBuf,
}

#[derive(Args)]
struct ConstructArgs {
    /// Channel: bec:<e>, bsc:<d> or awgn:<sigma>.
    #[arg(long)]
    channel: ChannelModel,
    /// Kernel exponent (N = 2^n).
    #[arg(long)]
    n: u32,
    /// Code dimension.
    #[arg(long)]
    k: usize,
    /// Secret position (default: most reliable information index).
    #[arg(long)]
    p: Option<usize>,
    /// Keep only the largest class of equal-weight rows of the information set.
    #[arg(long)]
    equal_weight: bool,
    /// Frozen values as a bit string (default: all zero).
    #[arg(long)]
    frozen_values: Option<BitVector>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AccessArgs {
    #[command(flatten)]
    code: CodeArg,
    #[arg(long, default_value = "full")]
    mode: Mode,
    /// Secret position to analyse (default: the code's).
    #[arg(long)]
    p: Option<usize>,
    /// One coalition per H_U row instead of the exact minimal sets.
    #[arg(long)]
    rows: bool,
    /// Also report positions present in every minimal set.
    #[arg(long)]
    dictators: bool,
}

#[derive(Args)]
struct DealArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Secret bit string, e.g. 1 or 1011.
    #[arg(long)]
    secret: String,
    /// Fixed seed. Insecure; for tests and reproducible examples only.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReconstructArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Member share file (repeatable).
    #[arg(long = "share", conflicts_with_all = ["dir", "members"])]
    shares: Vec<PathBuf>,
    /// Public values file.
    #[arg(long, conflicts_with_all = ["dir", "members"])]
    public: Option<PathBuf>,
    /// Directory written by `deal`.
    #[arg(long, requires = "members")]
    dir: Option<PathBuf>,
    /// Coalition to pool from --dir, e.g. P4,P6.
    #[arg(long, requires = "dir")]
    members: Option<Coalition>,
    /// Default: effective when public values are supplied, else full.
    #[arg(long)]
    mode: Option<Mode>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    code: CodeArg,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Coalition to track (repeatable), e.g. P4,P6.
    #[arg(long = "coalition")]
    coalitions: Vec<Coalition>,
    #[arg(long, default_value = "full")]
    mode: Mode,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// CSV output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    code: CodeArg,
    #[arg(long)]
    coalition: Coalition,
    #[arg(long, default_value = "full")]
    mode: Mode,
    #[arg(long)]
    p: Option<usize>,
}

enum Failure {
    /// Bad invocation: exit 2.
    Usage(String),
    /// Domain or I/O failure: exit 1.
    Domain(String),
}

impl From<polarss::Error> for Failure {
    fn from(e: polarss::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => write(path, text),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Domain(format!("stdout: {e}"))),
    }
}

fn load_code(arg: &CodeArg) -> Result<CodeSpec, Failure> {
    let text = read(&arg.code)?;
    format::read_code(&text).map_err(|e| Failure::Domain(format!("{}: {e}", arg.code.display())))
}

fn load_shares(path: &Path) -> Result<SharesFile, Failure> {
    format::read_shares(&read(path)?)
        .map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn construct(args: ConstructArgs) -> Outcome {
    let mut spec = build_code(args.channel, args.n, args.k, args.p)?;
    if args.equal_weight {
        let rows = construction::select_equal_weight_rows(&spec);
        spec = spec.restrict_information_set(&rows)?;
    }
    if let Some(values) = args.frozen_values {
        spec = spec.with_frozen_values(values)?;
    }
    emit(args.out.as_deref(), &format::write_code(&spec))
}

fn inspect(arg: CodeArg) -> Outcome {
    let spec = load_code(&arg)?;
    let canonical = format::write_code(&spec);
    let line = |key: &str| {
        canonical
            .lines()
            .find(|l| l.starts_with(&format!("{key} = ")))
            .unwrap_or_default()
            .to_string()
    };
    let g_u = generator_submatrix(&spec);
    let h_u = dual_submatrix(&spec);
    let orthogonal = g_u.mul(&h_u.transpose())?.is_zero();
    let mut out = String::new();
    out.push_str(&format!("{}\n", line("channel")));
    out.push_str(&format!("N = {}\n", spec.block_length()));
    out.push_str(&format!("k = {}\n", spec.dimension()));
    out.push_str(&format!("{}\n", line("A")));
    out.push_str(&format!("p = {}\n", spec.secret_position()));
    out.push_str(&format!("{}\n", line("frozen_values")));
    out.push_str(&format!("{}\n", line("reliability")));
    out.push_str(&format!(
        "code_digest = {}\n",
        format::digest_hex(format::code_digest(&spec))
    ));
    out.push_str("G_U =\n");
    for row in g_u.rows() {
        out.push_str(&format!("{row}  weight {}\n", row.weight()));
    }
    out.push_str("H_U =\n");
    for row in h_u.rows() {
        out.push_str(&format!("{row}  weight {}\n", row.weight()));
    }
    let verdict = if orthogonal { "ok" } else { "FAILED" };
    out.push_str(&format!("G_U * H_U^T = 0: {verdict}\n"));
    emit(None, &out)?;
    if orthogonal {
        Ok(())
    } else {
        Err(Failure::Domain("orthogonality check failed".into()))
    }
}

fn weights(n: u32) -> Outcome {
    if n > 16 {
        return Err(Failure::Usage(format!(
            "--n {n} is too large to tabulate (max 16)"
        )));
    }
    let size = 1usize << n;
    let mut out = format!(
        "{:>8}  {:>8}  {:>w$}  {:>w$}  weight\n",
        "column j",
        "j-1",
        "bits",
        "complement",
        w = n.max(10) as usize
    );
    let mut all = Vec::with_capacity(size);
    for j in 1..=size {
        let bits = format!("{:0w$b}", j - 1, w = n as usize);
        let complement: String = bits
            .chars()
            .map(|c| if c == '0' { '1' } else { '0' })
            .collect();
        let weight = construction::column_weight(j, size)?;
        all.push(weight.to_string());
        out.push_str(&format!(
            "{j:>8}  {:>8}  {bits:>w$}  {complement:>w$}  {weight}\n",
            j - 1,
            w = n.max(10) as usize
        ));
    }
    out.push_str(&format!("weights = {}\n", all.join(",")));
    emit(None, &out)
}

fn access_cmd(args: AccessArgs) -> Outcome {
    let spec = load_code(&args.code)?;
    let p = args.p.unwrap_or(spec.secret_position());
    let sets: Vec<Coalition> = if args.rows {
        access::row_coalitions(&spec, p, args.mode)?
            .into_iter()
            .map(|r| r.members)
            .collect()
    } else {
        access::minimal_access_sets(&spec, p, args.mode)?.minimal_sets
    };
    let mut out = format!("mode={} p={p} count={}\n", args.mode, sets.len());
    for s in &sets {
        out.push_str(&format!("{s}\n"));
    }
    if args.dictators {
        let structure = access::AccessStructure {
            p,
            mode: args.mode,
            minimal_sets: sets,
            dictators: Vec::new(),
        };
        let dictators = access::dictator_analysis(&structure)?;
        let labels: Vec<String> = dictators.iter().map(|d| format!("P{d}")).collect();
        out.push_str(&format!(
            "dictators = {}\n",
            if labels.is_empty() {
                "-".into()
            } else {
                labels.join(",")
            }
        ));
    }
    emit(None, &out)
}

fn parse_secret(text: &str) -> Result<Vec<bool>, Failure> {
    if text.is_empty() {
        return Err(Failure::Usage("--secret must not be empty".into()));
    }
    text.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Failure::Usage(format!(
                "--secret must be a bit string, found {other:?}"
            ))),
        })
        .collect()
}

fn write_dealing(dir: &Path, dealing: &Dealing) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| Failure::Domain(format!("{}: {e}", dir.display())))?;
    for share in &dealing.member_shares {
        let file =
            SharesFile::for_member(dealing, share.position).expect("share belongs to the dealing");
        write(
            &dir.join(format!("P{}.share", share.position)),
            &format::write_shares(&file),
        )?;
    }
    write(
        &dir.join("public.share"),
        &format::write_shares(&SharesFile::public_only(dealing)),
    )
}

fn deal(args: DealArgs) -> Outcome {
    let spec = load_code(&args.code)?;
    let secret = parse_secret(&args.secret)?;
    let dealings = match args.seed {
        Some(seed) => {
            eprintln!("warning: --seed makes the dealing reproducible; fixed seeds are insecure and meant for testing only");
            sharing::deal_string(&spec, &secret, &mut ChaCha20Rng::seed_from_u64(seed))?
        }
        None => {
            eprintln!("note: no --seed given, drawing from system entropy");
            sharing::deal_string(&spec, &secret, &mut rand::rng())?
        }
    };
    if sharing::public_values_reveal_secret(&spec) {
        eprintln!(
            "warning: for this code the public values alone determine the secret; \
             effective-mode sharing offers no secrecy"
        );
    }
    if let [dealing] = dealings.as_slice() {
        write_dealing(&args.out, dealing)?;
    } else {
        for (j, dealing) in dealings.iter().enumerate() {
            write_dealing(&args.out.join(format!("bit{}", j + 1)), dealing)?;
        }
    }
    eprintln!(
        "dealt {} bit(s) to {} member(s) in {}",
        dealings.len(),
        dealings[0].member_shares.len(),
        args.out.display()
    );
    Ok(())
}

/// Bundle for `coalition` from a directory written by `deal`.
fn bundle_from_dir(
    spec: &CodeSpec,
    dir: &Path,
    coalition: &Coalition,
) -> Result<ShareBundle, Failure> {
    let public = load_shares(&dir.join("public.share"))?;
    public.check_against(spec)?;
    let mut shares = Vec::new();
    for &m in coalition.members() {
        if spec.is_frozen(m) {
            // a member at a frozen position holds the published value
            let value = public
                .public_values
                .iter()
                .find(|s| s.position == m)
                .ok_or_else(|| Failure::Domain(format!("public file lacks position {m}")))?;
            shares.push(Share::member(m, value.bit));
        } else {
            let file = load_shares(&dir.join(format!("P{m}.share")))?;
            file.check_against(spec)?;
            shares.extend(
                file.member_shares
                    .iter()
                    .filter(|s| s.position == m)
                    .copied(),
            );
        }
    }
    Ok(ShareBundle {
        shares,
        public_values: public.public_values,
    })
}

fn reconstruct_cmd(args: ReconstructArgs) -> Outcome {
    let spec = load_code(&args.code)?;
    let bits = if let (Some(dir), Some(members)) = (&args.dir, &args.members) {
        let mode = args.mode.unwrap_or(Mode::Full);
        let dirs: Vec<PathBuf> = if dir.join("public.share").exists() {
            vec![dir.clone()]
        } else {
            let numbered: Vec<PathBuf> = (1..)
                .map(|j| dir.join(format!("bit{j}")))
                .take_while(|d| d.is_dir())
                .collect();
            if numbered.is_empty() {
                return Err(Failure::Domain(format!(
                    "{}: no dealing found",
                    dir.display()
                )));
            }
            numbered
        };
        let bundles = dirs
            .iter()
            .map(|d| bundle_from_dir(&spec, d, members))
            .collect::<Result<Vec<_>, _>>()?;
        sharing::reconstruct_string(&spec, &bundles, mode)?
    } else {
        if args.shares.is_empty() && args.public.is_none() {
            return Err(Failure::Usage(
                "give --share/--public files or --dir with --members".into(),
            ));
        }
        let mode = args.mode.unwrap_or(if args.public.is_some() {
            Mode::Effective
        } else {
            Mode::Full
        });
        let mut files = args
            .shares
            .iter()
            .map(|p| load_shares(p))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(public) = &args.public {
            files.push(load_shares(public)?);
        }
        let merged = SharesFile::merge(&files)?;
        merged.check_against(&spec)?;
        let bundle = ShareBundle {
            shares: merged.member_shares,
            public_values: merged.public_values,
        };
        vec![sharing::reconstruct(&spec, &bundle, mode)?]
    };
    let text: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
    emit(None, &format!("{text}\n"))
}

fn simulate_cmd(args: SimulateArgs) -> Outcome {
    let spec = load_code(&args.code)?;
    let seed = args.seed.unwrap_or_else(|| {
        let seed = rand::random();
        eprintln!("note: no --seed given, using seed {seed}");
        seed
    });
    let report = match args.workers {
        Some(w) => transmission::simulate_with_workers(
            &spec,
            &args.coalitions,
            args.mode,
            args.trials,
            seed,
            w,
        )?,
        None => transmission::simulate(&spec, &args.coalitions, args.mode, args.trials, seed)?,
    };
    emit(args.out.as_deref(), &report.to_csv())
}

fn audit_cmd(args: AuditArgs) -> Outcome {
    let spec = load_code(&args.code)?;
    let p = args.p.unwrap_or(spec.secret_position());
    let report = sharing::security_audit(&spec, p, &args.coalition, args.mode)?;
    let observed: Vec<String> = report.observed.iter().map(usize::to_string).collect();
    let mut out = format!("mode={} p={p} coalition={}\n", args.mode, args.coalition);
    out.push_str(&format!(
        "observed = {}\n",
        if observed.is_empty() {
            "-".to_string()
        } else {
            observed.join(",")
        }
    ));
    out.push_str("view s=0 s=1\n");
    for (view, [zero, one]) in &report.counts {
        let label = if view.is_empty() {
            "-".to_string()
        } else {
            view.to_string()
        };
        out.push_str(&format!("{label} {zero} {one}\n"));
    }
    let verdict = if report.is_balanced() {
        "balanced: the coalition learns nothing about the secret"
    } else if report.is_determined() {
        "determined: the coalition recovers the secret"
    } else {
        "partial: the coalition's view biases the secret"
    };
    out.push_str(&format!("verdict = {verdict}\n"));
    emit(None, &out)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Construct(a) => construct(a),
        Command::Inspect(a) => inspect(a),
        Command::Weights { n } => weights(n),
        Command::Access(a) => access_cmd(a),
        Command::Deal(a) => deal(a),
        Command::Reconstruct(a) => reconstruct_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Audit(a) => audit_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
