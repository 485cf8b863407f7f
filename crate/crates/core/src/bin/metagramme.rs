use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use metagramme::cli::{self, CmdOutput, GrammarSource, ParseInput};

#[derive(Parser)]
#[command(name = "metagramme", version, about = "Compile metagrammars, anchor lexicons and parse with MWE-aware LTAGs")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a project into a grammar file
    Compile {
        #[arg(short, long)]
        manifest: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Parse a sentence or a corpus file
    #[command(group(ArgGroup::new("src").required(true).args(["grammar", "manifest"])))]
    #[command(group(ArgGroup::new("input").required(true).args(["sentence", "corpus"])))]
    Parse {
        #[arg(short, long)]
        grammar: Option<PathBuf>,
        #[arg(short, long)]
        manifest: Option<PathBuf>,
        #[arg(short, long)]
        sentence: Option<String>,
        #[arg(short, long)]
        corpus: Option<PathBuf>,
    },
    /// List the trees a word form anchors
    #[command(group(ArgGroup::new("src").required(true).args(["grammar", "manifest"])))]
    Anchor {
        #[arg(short, long)]
        grammar: Option<PathBuf>,
        #[arg(short, long)]
        manifest: Option<PathBuf>,
        #[arg(short, long)]
        word: String,
    },
    /// Class and MWE lemma growth between two projects
    Stats {
        #[arg(short = 'a', long)]
        before: PathBuf,
        #[arg(short = 'b', long)]
        after: PathBuf,
    },
}

fn source(grammar: Option<PathBuf>, manifest: Option<PathBuf>) -> GrammarSource {
    match (grammar, manifest) {
        (Some(g), _) => GrammarSource::Compiled(g),
        (None, Some(m)) => GrammarSource::Manifest(m),
        (None, None) => unreachable!("clap requires one of them"),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let out: CmdOutput = match Args::parse().cmd {
        Cmd::Compile { manifest, out } => cli::cmd_compile(&manifest, out.as_deref()),
        Cmd::Parse { grammar, manifest, sentence, corpus } => {
            let input = match (sentence, corpus) {
                (Some(s), _) => ParseInput::Sentence(s),
                (None, Some(c)) => ParseInput::Corpus(c),
                (None, None) => unreachable!("clap requires one of them"),
            };
            cli::cmd_parse(&source(grammar, manifest), &input)
        }
        Cmd::Anchor { grammar, manifest, word } => cli::cmd_anchor(&source(grammar, manifest), &word),
        Cmd::Stats { before, after } => cli::cmd_stats(&before, &after),
    };
    for l in &out.stdout {
        println!("{l}");
    }
    for l in &out.stderr {
        eprintln!("{l}");
    }
    ExitCode::from(out.code as u8)
}
