//! `symdyn`: command-line front end.
//!
//! Exit status is 0 on success, 1 when the library rejects the input or a
//! check fails, and 2 on a usage error.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read as _};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use symdyn::experiments::{
    chain_rows_csv, experiment_chain_diameter, experiment_slope_map, slope_rows_csv, ChainDiameterSpec,
    ChainInstance,
};
use symdyn::grid2d::{self, Pattern2D, Rect, Sft2D};
use symdyn::layers::{self, Freedom, Sequence, SequencePair};
use symdyn::shift1d::{chain_graph, ztcpe_report, Sft1D};
use symdyn::spacer1d::{self, GapPattern};
use symdyn::spacer2d::{self, Axis};
use symdyn::words::{self, Word};
use symdyn::{Error, Quadratic, Rational};

#[derive(Parser)]
#[command(name = "symdyn", version, about = "Balanced words, subshifts and spacer transforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic sequences and balance checks.
    #[command(subcommand)]
    Words(WordsCmd),
    /// One-dimensional shifts of finite type.
    #[command(subcommand)]
    Sft1d(Sft1dCmd),
    /// The one-dimensional spacer transform.
    #[command(subcommand)]
    Spacer1d(Spacer1dCmd),
    /// Two-dimensional patterns, fills and ribbon embeddings.
    #[command(subcommand)]
    Grid2d(Grid2dCmd),
    /// The three-layer balanced-plane shift.
    #[command(subcommand)]
    Layers(LayersCmd),
    /// The two-dimensional spacer transform.
    #[command(subcommand)]
    Spacer2d(Spacer2dCmd),
    /// Table-producing experiments (CSV).
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Subcommand)]
enum WordsCmd {
    /// Window of a characteristic sequence.
    Char {
        /// Slope as `p/q` or `(a+b*sqrt(d))/c`.
        #[arg(long)]
        alpha: Quadratic,
        #[arg(long, default_value = "0")]
        intercept: Quadratic,
        /// Inclusive index range `lo:hi`.
        #[arg(long, value_parser = parse_range)]
        range: (i64, i64),
        /// Ceiling sequence instead of the floor sequence.
        #[arg(long)]
        upper: bool,
    },
    /// Whether a binary word is k-balanced.
    Check {
        word: Word,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Slope interval of a word, or the common interval of two words.
    Interval { word: Word, other: Option<Word> },
}

#[derive(Args)]
struct SftArgs {
    /// Comma-separated forbidden words.
    #[arg(long, value_delimiter = ',', conflicts_with = "file")]
    forbid: Vec<String>,
    #[arg(long, default_value = "01")]
    alphabet: String,
    /// Forbidden-list file: alphabet line, then one word per line.
    #[arg(long)]
    file: Option<String>,
}

impl SftArgs {
    fn load(&self) -> Result<Sft1D, Error> {
        match &self.file {
            Some(path) => Sft1D::parse(&read_input(path)?),
            None => {
                let f: Vec<&str> = self.forbid.iter().map(String::as_str).filter(|s| !s.is_empty()).collect();
                Sft1D::from_strs(&self.alphabet, &f)
            }
        }
    }
}

#[derive(Subcommand)]
enum Sft1dCmd {
    /// Words of length n, one per line.
    Language {
        #[command(flatten)]
        sft: SftArgs,
        #[arg(long)]
        n: usize,
    },
    /// Topological entropy (natural log).
    Entropy {
        #[command(flatten)]
        sft: SftArgs,
    },
    /// Periodic witnesses and chain connectivity for lengths 1..=nmax.
    Report {
        #[command(flatten)]
        sft: SftArgs,
        #[arg(long)]
        nmax: usize,
        /// Annulus radius; `n + 2t + 4` per length when absent.
        #[arg(long)]
        radius: Option<usize>,
        /// Write the chain graph at length nmax as DOT.
        #[arg(long)]
        dot: Option<String>,
    },
}

#[derive(Subcommand)]
enum Spacer1dCmd {
    /// Induce a word with the given gaps, or project a spaced word back.
    Transform {
        word: Word,
        /// Comma-separated gaps in {2,3,4}; all 3 when absent.
        #[arg(long, value_delimiter = ',')]
        gaps: Vec<usize>,
        #[arg(long)]
        project: bool,
    },
    /// Forbidden list of the image shift.
    Flist {
        #[command(flatten)]
        sft: SftArgs,
    },
}

#[derive(Subcommand)]
enum Grid2dCmd {
    /// Check a pattern against a rule file, or against X_H / X_V.
    Validate {
        #[arg(long)]
        pattern: String,
        #[command(flatten)]
        rules: RuleArgs,
    },
    /// Complete a partial pattern on a rectangle.
    Fill {
        #[arg(long)]
        pattern: String,
        #[command(flatten)]
        rules: RuleArgs,
        /// `x0,y0,width,height`.
        #[arg(long, value_parser = parse_rect)]
        rect: Rect,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Embed an X_H window in a window homoclinic to the flat point.
    Embed {
        #[arg(long, required_unless_present = "seed")]
        pattern: Option<String>,
        /// Embed a random window generated from this seed instead.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 10)]
        max_side: i64,
        /// Frame thickness; the least sufficient margin when absent.
        #[arg(long)]
        margin: Option<i64>,
    },
}

#[derive(Args)]
struct RuleArgs {
    /// Rule file: alphabet line, then forbidden grids.
    #[arg(long, conflicts_with = "ribbons")]
    rules: Option<String>,
    #[arg(long, value_enum)]
    ribbons: Option<Ribbons>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ribbons {
    H,
    V,
}

impl RuleArgs {
    fn load(&self) -> Result<Sft2D, Error> {
        match (&self.rules, self.ribbons) {
            (Some(path), _) => Sft2D::parse(&read_input(path)?),
            (None, Some(Ribbons::H)) => Ok(grid2d::xh_rules()),
            (None, Some(Ribbons::V)) => Ok(grid2d::xv_rules()),
            (None, None) => Err(Error::Input("give --rules or --ribbons".into())),
        }
    }
}

#[derive(Subcommand)]
enum LayersCmd {
    /// Window of the point built from a pair of row sequences.
    Build {
        /// Sequence: `L|C|R`, a period word, `lower:α` or `upper:α+ρ`.
        #[arg(long)]
        a: Sequence,
        #[arg(long)]
        b: Sequence,
        #[arg(long, value_parser = parse_rect)]
        rect: Rect,
        #[arg(long, default_value_t = 2)]
        collar: i64,
        /// Third-layer value of a free row, `y=v`.
        #[arg(long = "free", value_parser = parse_free)]
        free: Vec<(i64, u8)>,
    },
    /// Category tags of a jointly balanced pair.
    Classify {
        #[arg(long)]
        a: Sequence,
        #[arg(long)]
        b: Sequence,
        #[arg(long, default_value_t = 64)]
        radius: i64,
    },
}

#[derive(Subcommand)]
enum Spacer2dCmd {
    /// Put base letters on the crossings of an X_H and an X_V window.
    Superimpose {
        #[arg(long)]
        xh: String,
        #[arg(long)]
        xv: String,
        /// Base pattern: cell (j, i) is the letter of vertical ribbon j
        /// and horizontal ribbon i.
        #[arg(long)]
        base: String,
    },
    /// Shift ribbons one step inside a region.
    Move {
        #[arg(long)]
        window: String,
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_sign)]
        sign: i64,
        #[arg(long, value_parser = parse_rect)]
        region: Rect,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Horizontal,
    Vertical,
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Chain-graph components and diameters per word length.
    ChainDiameter {
        /// `golden`, `full`, `forbid:w1,w2,...` or `spacer-balanced:L`.
        #[arg(long)]
        instance: String,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long, default_value_t = 2000)]
        max_words: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Slope intervals of characteristic windows over a slope grid.
    SlopeMap {
        /// Slopes k/grid for k = 0..=grid.
        #[arg(long, default_value_t = 10)]
        grid: i64,
        /// Comma-separated window lengths.
        #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50,60,70,80,90,100")]
        lengths: Vec<usize>,
        #[arg(long)]
        out: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Library(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Check(out)) => {
            print!("{out}");
            ExitCode::from(1)
        }
    }
}

enum Failure {
    Library(Error),
    /// The command ran but its check failed; the output is still printed.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

type Outcome = Result<String, Failure>;

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Words(c) => words_cmd(c),
        Command::Sft1d(c) => sft1d_cmd(c),
        Command::Spacer1d(c) => spacer1d_cmd(c),
        Command::Grid2d(c) => grid2d_cmd(c),
        Command::Layers(c) => layers_cmd(c),
        Command::Spacer2d(c) => spacer2d_cmd(c),
        Command::Experiment(c) => experiment_cmd(c),
    }
}

fn words_cmd(cmd: WordsCmd) -> Outcome {
    match cmd {
        WordsCmd::Char { alpha, intercept, range: (lo, hi), upper } => {
            if lo > hi {
                return Err(Error::Input(format!("empty range {lo}:{hi}")).into());
            }
            let mut s = String::new();
            for n in lo..=hi {
                s.push(char::from(words::char_letter(&alpha, &intercept, n, upper)?));
            }
            Ok(s + "\n")
        }
        WordsCmd::Check { word, k } => {
            let ok = words::is_k_balanced(&word, k)?;
            let line = format!("{}-balanced: {}\n", k, if ok { "yes" } else { "no" });
            if ok {
                Ok(line)
            } else {
                Err(Failure::Check(line))
            }
        }
        WordsCmd::Interval { word, other } => {
            let iv = match other {
                None => Some(words::slope_interval(&word)?),
                Some(v) => words::joint_slope_interval(&word, &v)?,
            };
            match iv {
                Some(iv) => Ok(format!("{iv}\n")),
                None => Err(Failure::Check("empty\n".into())),
            }
        }
    }
}

fn sft1d_cmd(cmd: Sft1dCmd) -> Outcome {
    match cmd {
        Sft1dCmd::Language { sft, n } => {
            let x = sft.load()?;
            Ok(x.language(n).iter().map(|w| format!("{}\n", w.as_str())).collect())
        }
        Sft1dCmd::Entropy { sft } => Ok(format!("{:.9}\n", sft.load()?.entropy()?)),
        Sft1dCmd::Report { sft, nmax, radius, dot } => {
            let x = sft.load()?;
            let report = ztcpe_report(&x, nmax, radius)?;
            if let Some(path) = dot {
                let r = radius.unwrap_or_else(|| symdyn::shift1d::default_radius(nmax, x.type_t()));
                write_file(&path, &chain_graph(&x, nmax, r)?.to_dot())?;
            }
            Ok(format!("{report}\n"))
        }
    }
}

fn spacer1d_cmd(cmd: Spacer1dCmd) -> Outcome {
    match cmd {
        Spacer1dCmd::Transform { word, gaps, project } => {
            if project {
                return Ok(format!("{}\n", spacer1d::project_word(&word)?.as_str()));
            }
            let g = if gaps.is_empty() {
                GapPattern::uniform(word.len().saturating_sub(1), 3)?
            } else {
                GapPattern::new(gaps)?
            };
            Ok(format!("{}\n", spacer1d::induce_word(&word, &g)?.as_str()))
        }
        Spacer1dCmd::Flist { sft } => {
            let x = sft.load()?;
            let f = spacer1d::f_forbidden_list(x.alphabet(), x.forbidden())?;
            Ok(f.iter().map(|w| format!("{}\n", w.as_str())).collect())
        }
    }
}

fn grid2d_cmd(cmd: Grid2dCmd) -> Outcome {
    match cmd {
        Grid2dCmd::Validate { pattern, rules } => {
            let x = rules.load()?;
            let p = Pattern2D::parse(&read_input(&pattern)?)?;
            let v = x.violations(&p)?;
            if v.is_empty() {
                return Ok("valid\n".into());
            }
            let mut s = String::new();
            for (k, (px, py)) in v {
                s.push_str(&format!("forbidden pattern {k} at ({px},{py})\n"));
            }
            Err(Failure::Check(s))
        }
        Grid2dCmd::Fill { pattern, rules, rect, seed } => {
            let x = rules.load()?;
            let p = Pattern2D::parse(&read_input(&pattern)?)?;
            let mut prob = grid2d::FillProblem::new(&x, rect);
            prob.fix_all(&p)?;
            let opts = grid2d::FillOptions { seed, ..Default::default() };
            match prob.solve(&opts) {
                grid2d::FillOutcome::Filled(w) => Ok(w.to_text()),
                _ => Err(Failure::Check("no filling\n".into())),
            }
        }
        Grid2dCmd::Embed { pattern, seed, max_side, margin } => {
            let w = match (pattern, seed) {
                (Some(path), _) => Pattern2D::parse(&read_input(&path)?)?,
                (None, Some(seed)) => grid2d::random_xh_window(seed, max_side),
                (None, None) => unreachable!("clap requires one of them"),
            };
            let m = match margin {
                Some(m) => m,
                None => grid2d::required_margin(&w)?,
            };
            Ok(grid2d::embed_homoclinic_xh(&w, m)?.to_text())
        }
    }
}

fn layers_cmd(cmd: LayersCmd) -> Outcome {
    match cmd {
        LayersCmd::Build { a, b, rect, collar, free } => {
            let free: BTreeMap<i64, u8> = free.into_iter().collect();
            let built = layers::build_point_window(&SequencePair::new(a, b), rect, &free, collar)?;
            let mut s = built.pattern.to_text();
            for (y, f) in &built.free {
                let kind = match f {
                    Freedom::Global => "global",
                    Freedom::Local => "local",
                };
                s.push_str(&format!("# free row {y} {kind}\n"));
            }
            Ok(s)
        }
        LayersCmd::Classify { a, b, radius } => {
            let tags = layers::classify_pair(&SequencePair::new(a, b), radius)?;
            let t: Vec<String> = tags.iter().map(u8::to_string).collect();
            Ok(format!("{}\n", t.join(",")))
        }
    }
}

fn spacer2d_cmd(cmd: Spacer2dCmd) -> Outcome {
    match cmd {
        Spacer2dCmd::Superimpose { xh, xv, base } => {
            let xh = Pattern2D::parse(&read_input(&xh)?)?;
            let xv = Pattern2D::parse(&read_input(&xv)?)?;
            let t = Pattern2D::parse(&read_input(&base)?)?;
            Ok(spacer2d::to_text_b(&spacer2d::superimpose(&xh, &xv, &t)?))
        }
        Spacer2dCmd::Move { window, axis, sign, region } => {
            let w = spacer2d::parse_b(&read_input(&window)?)?;
            let axis = match axis {
                AxisArg::Horizontal => Axis::Horizontal,
                AxisArg::Vertical => Axis::Vertical,
            };
            Ok(spacer2d::to_text_b(&spacer2d::meander_move(&w, axis, sign, region)?))
        }
    }
}

fn experiment_cmd(cmd: ExperimentCmd) -> Outcome {
    let (csv, out) = match cmd {
        ExperimentCmd::ChainDiameter { instance, nmax, radius, max_words, out } => {
            let spec = ChainDiameterSpec { instance: parse_instance(&instance)?, n_max: nmax, radius, max_words };
            (chain_rows_csv(&experiment_chain_diameter(&spec)?), out)
        }
        ExperimentCmd::SlopeMap { grid, lengths, out } => {
            if grid < 1 {
                return Err(Error::Input("grid must be positive".into()).into());
            }
            let slopes: Vec<Rational> = (0..=grid).map(|k| Rational::new(k, grid)).collect();
            (slope_rows_csv(&experiment_slope_map(&slopes, &lengths)?), out)
        }
    };
    match out {
        Some(path) => {
            write_file(&path, &csv)?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}

fn parse_instance(s: &str) -> Result<ChainInstance, Error> {
    if let Some(rest) = s.strip_prefix("spacer-balanced:") {
        let window = rest.parse().map_err(|_| Error::Parse(format!("bad window length '{rest}'")))?;
        return Ok(ChainInstance::SpacerBalanced { window });
    }
    let x = match s {
        "golden" => Sft1D::from_strs("01", &["11"])?,
        "full" => Sft1D::full_shift(b"01")?,
        _ => match s.strip_prefix("forbid:") {
            Some(list) => Sft1D::from_strs("01", &list.split(',').collect::<Vec<_>>())?,
            None => return Err(Error::Parse(format!("unknown instance '{s}'"))),
        },
    };
    Ok(ChainInstance::Sft(x))
}

fn read_input(path: &str) -> Result<String, Error> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Error::Input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{path}: {e}")))
}

fn write_file(path: &str, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Input(format!("{path}: {e}")))
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(':').ok_or("expected lo:hi")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_rect(s: &str) -> Result<Rect, String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|e| format!("{e}")))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [x0, y0, w, h] if *w > 0 && *h > 0 => Ok(Rect::new(*x0, *y0, *w, *h)),
        [_, _, _, _] => Err("width and height must be positive".into()),
        _ => Err("expected x0,y0,width,height".into()),
    }
}

fn parse_free(s: &str) -> Result<(i64, u8), String> {
    let (y, v) = s.split_once('=').ok_or("expected y=v")?;
    Ok((y.trim().parse().map_err(|e| format!("{e}"))?, v.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_sign(s: &str) -> Result<i64, String> {
    match s {
        "1" | "+1" | "+" => Ok(1),
        "-1" | "-" => Ok(-1),
        _ => Err("sign must be +1 or -1".into()),
    }
}
