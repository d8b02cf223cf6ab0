//! `gchw`: command-line front end for the golden-matrix cipher.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 authentication failure,
//! 3 corruption, 4 parse error, 5 usage.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use golden_cipher::keyschedule::{golden_base, parse_secret};
use golden_cipher::{ahuffman, analysis, attack, envelope, CipherKey, RecurrenceKind};
use rand::RngCore;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Cipher(#[from] golden_cipher::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use golden_cipher::Error as E;
        match self {
            CliError::Usage(_) => 5,
            CliError::Io { .. } => 1,
            CliError::Cipher(e) => match e {
                E::Authentication => 2,
                E::Corruption(_) | E::CorruptStream(_) => 3,
                E::Parse(_) | E::InvalidKey(_) => 4,
                _ => 1,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "gchw",
    version,
    about = "Compress-then-encrypt golden-matrix cipher (not secure)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a key file.
    Keygen {
        #[arg(long, value_parser = parse_kind)]
        kind: RecurrenceKind,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long)]
        level: u32,
        /// 64 hex characters; random when omitted.
        #[arg(long)]
        seed: Option<String>,
        /// 64 hex characters; random when omitted.
        #[arg(long)]
        mac_key: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Print the golden matrix before the transform.
        #[arg(long)]
        dump_golden: bool,
    },
    /// Compress, authenticate and encrypt a file.
    Encrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decrypt, verify and decompress an envelope.
    Decrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Adaptive Huffman compression only.
    Compress {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    Decompress {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plain/cipher statistics as CSV.
    Analyze {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        /// Number of randomization seeds; the first is the key's own.
        #[arg(long, default_value_t = 1)]
        seeds: u32,
        /// Also list the cipher values at every position of this character.
        #[arg(long = "char")]
        focus: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Chosen-plaintext key recovery against the continuous golden cipher.
    AttackDemo {
        #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
        x: f64,
    },
}

fn parse_kind(s: &str) -> std::result::Result<RecurrenceKind, String> {
    s.parse().map_err(|e: golden_cipher::Error| e.to_string())
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, data: impl AsRef<[u8]>) -> CliResult<()> {
    fs::write(path, data).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn load_key(path: &Path) -> CliResult<CipherKey> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| golden_cipher::Error::Parse("key file is not UTF-8".into()))?;
    Ok(CipherKey::from_key_file(&text)?)
}

fn secret(arg: Option<&str>, field: &str) -> CliResult<[u8; 32]> {
    match arg {
        Some(hex) => parse_secret(hex, field).map_err(|e| CliError::Usage(e.to_string())),
        None => {
            let mut out = [0u8; 32];
            rand::rngs::OsRng.fill_bytes(&mut out);
            Ok(out)
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Keygen {
            kind,
            n,
            p,
            level,
            seed,
            mac_key,
            out,
            dump_golden,
        } => {
            let key = CipherKey {
                kind,
                n,
                p,
                level,
                seed: secret(seed.as_deref(), "seed")?,
                mac_key: secret(mac_key.as_deref(), "mac_key")?,
            };
            key.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            if dump_golden {
                print!("{}", golden_base(&key)?);
            }
            golden_cipher::derive(&key)?;
            write(&out, key.to_key_file())
        }
        Command::Encrypt { key, input, out } => {
            let key = load_key(&key)?;
            let env = envelope::seal(&read(&input)?, &key)?;
            write(&out, envelope::serialize(&env))
        }
        Command::Decrypt { key, input, out } => {
            let key = load_key(&key)?;
            let env = envelope::deserialize(&read(&input)?)?;
            let plain = envelope::open(&env, &key)?;
            write(&out, plain)
        }
        Command::Compress { input, out } => write(&out, ahuffman::compress_file(&read(&input)?)),
        Command::Decompress { input, out } => {
            write(&out, ahuffman::decompress_file(&read(&input)?)?)
        }
        Command::Analyze {
            key,
            input,
            seeds,
            focus,
            out,
        } => {
            let focus = match focus.as_deref().map(str::as_bytes) {
                None => None,
                Some([b]) => Some(*b),
                Some(_) => {
                    return Err(CliError::Usage(
                        "--char takes a single byte character".into(),
                    ))
                }
            };
            if seeds == 0 {
                return Err(CliError::Usage("--seeds must be at least 1".into()));
            }
            let key = load_key(&key)?;
            let plain = read(&input)?;
            let mut keys = vec![key.clone()];
            keys.extend(analysis::replica_keys(&key, seeds - 1));
            let mut csv = String::from(
                "# paired statistics use the first n_pairs entries of the plain and cipher series\n",
            );
            csv.push_str(analysis::REPORT_HEADER);
            csv.push('\n');
            let mut first_env = None;
            for (i, k) in keys.iter().enumerate() {
                let env = envelope::seal(&plain, k)?;
                csv.push_str(&analysis::analyze(&plain, &env)?.csv_row(i));
                csv.push('\n');
                first_env.get_or_insert(env);
            }
            csv.push('\n');
            let env = first_env.expect("at least one seed");
            csv.push_str(&analysis::contrast_csv(&plain, &env, focus));
            write(&out, csv)
        }
        Command::AttackDemo { x } => {
            print!("{}", attack::demo(x)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(5),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
