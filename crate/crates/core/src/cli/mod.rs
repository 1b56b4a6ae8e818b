//! Command-line front end over the library.

mod demo;
mod keystore;

use clap::{Parser, Subcommand};
use keystore::Keystore;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use std::fs;
use std::path::{Path, PathBuf};
use tracesig::lattice::{validate_params, ParamSet};
use tracesig::oracles::digest32;
use tracesig::scheme::{self, AuditFinding, Certificate, ClaimProof, GroupSignature, JoinRequest, JoinResponse, PendingUser, Registry, TracingTrapdoor, UserSecret};
use tracesig::sigs::{usersig_keygen, UserSigningKey};

pub const EXIT_OK: u8 = 0;
pub const EXIT_REJECTED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}: {1}")]
    File(String, tracesig::Error),
    #[error(transparent)]
    Lib(#[from] tracesig::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use tracesig::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::File(_, e) | CliError::Lib(e) => match e {
                E::Io(_) | E::Integrity(_) | E::Decode(_) | E::Param(_) | E::Dimension(_) | E::ModulusMismatch(..) => EXIT_USAGE,
                _ => EXIT_REJECTED,
            },
        }
    }
}

/// A one-line result for stdout and whether it counts as success.
pub struct Outcome {
    pub line: String,
    pub accepted: bool,
}

impl Outcome {
    fn ok(line: impl Into<String>) -> Self {
        Self { line: line.into(), accepted: true }
    }

    fn rejected(line: impl Into<String>) -> Self {
        Self { line: line.into(), accepted: false }
    }
}

#[derive(Parser, Debug)]
#[command(name = "tracesig", version, about = "Lattice-based traceable group signatures")]
pub struct Cli {
    /// Directory holding keys, registry and member files.
    #[arg(long, global = true, env = "TRACESIG_KEYSTORE", default_value = "keystore")]
    pub keystore: PathBuf,
    /// Derive all randomness from this seed so runs are reproducible.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Choose moduli for a security level and group size and check every constraint.
    Setup {
        #[arg(long, default_value_t = 16)]
        lambda: usize,
        /// Must be one less than a power of two.
        #[arg(long, default_value_t = 7)]
        group_size: u64,
    },
    /// Generate the group public key, the manager and opener keys and an empty registry.
    Keygen,
    /// Applicant: create a join request under a local name.
    JoinRequest {
        #[arg(long, default_value = "member")]
        name: String,
    },
    /// Manager: certify a pending request and record it in the registry.
    JoinApprove {
        #[arg(long, default_value = "member")]
        name: String,
    },
    /// Applicant: check the certificate and store the member key.
    JoinFinish {
        #[arg(long, default_value = "member")]
        name: String,
    },
    /// Member: sign a message file anonymously on behalf of the group.
    Sign {
        #[arg(long = "as")]
        member: u64,
        #[arg(long)]
        msg: PathBuf,
        /// Defaults to the message path with `.sig` appended.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a group signature on a message file.
    Verify {
        #[arg(long)]
        msg: PathBuf,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Opener: recover the signer's identifier.
    Open {
        #[arg(long)]
        msg: PathBuf,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Opener: export the tracing trapdoor of a registered member.
    Reveal {
        #[arg(long)]
        id: u64,
    },
    /// Test whether a signature was produced by the member behind a trapdoor.
    Trace {
        #[arg(long)]
        trapdoor: PathBuf,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Member: prove authorship of a signature.
    Claim {
        #[arg(long = "as")]
        member: u64,
        #[arg(long)]
        msg: PathBuf,
        #[arg(long)]
        sig: PathBuf,
        /// Defaults to the signature path with `.claim` appended.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an authorship claim against its signature.
    ClaimVerify {
        #[arg(long)]
        msg: PathBuf,
        #[arg(long)]
        sig: PathBuf,
        #[arg(long)]
        claim: PathBuf,
    },
    /// Run a three-member lifecycle in the keystore and check every step.
    Demo {
        #[arg(long, default_value_t = 16)]
        lambda: usize,
        #[arg(long, default_value_t = 7)]
        group_size: u64,
    },
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let ctx = Context::new(cli.keystore, cli.seed);
    match execute(&ctx, &cli.command) {
        Ok(out) => {
            println!("{}", out.line);
            if out.accepted {
                EXIT_OK
            } else {
                EXIT_REJECTED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub struct Context {
    ks: Keystore,
    seed: Option<u64>,
}

impl Context {
    pub fn new(keystore: PathBuf, seed: Option<u64>) -> Self {
        Self { ks: Keystore::new(keystore, seed.is_some()), seed }
    }

    /// A fresh generator per command; seeded runs key it on the command and its inputs.
    fn rng(&self, label: &str, inputs: &[&[u8]]) -> ChaCha20Rng {
        match self.seed {
            Some(seed) => {
                let seed = seed.to_le_bytes();
                let mut parts: Vec<&[u8]> = vec![&seed, label.as_bytes()];
                parts.extend_from_slice(inputs);
                ChaCha20Rng::from_seed(digest32(b"CLI-RNG", &parts))
            }
            None => ChaCha20Rng::from_rng(&mut rand::rng()),
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::File(path.display().to_string(), e.into()))
}

fn load_signature(gpk: &scheme::GroupPublicKey, path: &Path) -> Result<GroupSignature, CliError> {
    GroupSignature::from_bytes_for(&keystore::read(path)?, gpk).map_err(|e| CliError::File(path.display().to_string(), e))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn execute(ctx: &Context, command: &Command) -> Result<Outcome, CliError> {
    let ks = &ctx.ks;
    match command {
        Command::Setup { lambda, group_size } => {
            let pp = ParamSet::setup(*lambda, *group_size)?;
            let report = validate_params(&pp);
            eprint!("{report}");
            if !report.all_pass() {
                return Err(CliError::Usage("parameter constraints fail".into()));
            }
            ks.save(&ks.params(), &pp, "params", None)?;
            Ok(Outcome::ok(format!("params=ok n={} q'={} q={} N={}", pp.n, pp.q_prime.value(), pp.q.value(), pp.group_size)))
        }
        Command::Keygen => {
            let pp: ParamSet = ks.load(&ks.params())?;
            let keys = scheme::keygen(&pp, &mut ctx.rng("keygen", &[]))?;
            ks.save(&ks.gpk(), &keys.gpk, "group-public-key", None)?;
            ks.save(&ks.gsk(), &keys.gsk, "manager-key", None)?;
            ks.save(&ks.osk(), &keys.osk, "opener-key", None)?;
            ks.save(&ks.registry(), &keys.registry, "registry", None)?;
            Ok(Outcome::ok("keygen=ok"))
        }
        Command::JoinRequest { name } => {
            let gpk = ks.load_gpk()?;
            let mut rng = ctx.rng("join-request", &[name.as_bytes()]);
            let key_path = ks.user_key(name);
            let mut user_sk: UserSigningKey = if key_path.exists() { ks.load(&key_path)? } else { usersig_keygen(&mut rng).1 };
            let (request, pending) = scheme::join_user_request(&gpk, &mut user_sk, &mut rng)?;
            ks.save(&key_path, &user_sk, "user-signing-key", None)?;
            ks.save(&ks.join_file(name, "pending"), &pending, "join-pending", None)?;
            let path = ks.join_file(name, "request");
            ks.save(&path, &request, "join-request", None)?;
            Ok(Outcome::ok(format!("request={}", path.display())))
        }
        Command::JoinApprove { name } => {
            let gpk = ks.load_gpk()?;
            let gsk = ks.load(&ks.gsk())?;
            let mut registry: Registry = ks.load(&ks.registry())?;
            let request: JoinRequest = ks.load(&ks.join_file(name, "request"))?;
            let mut rng = ctx.rng("join-approve", &[name.as_bytes(), &registry.counter().to_le_bytes()]);
            match scheme::join_gm_process(&gsk, &gpk, &mut registry, &request, &mut rng) {
                Ok(response) => {
                    let id = response.cert_sig.id;
                    ks.save(&ks.registry(), &registry, "registry", None)?;
                    ks.save(&ks.join_file(name, "response"), &response, "join-response", Some(id))?;
                    Ok(Outcome::ok(format!("id={id}")))
                }
                Err(tracesig::Error::Rejected(why)) => {
                    eprintln!("join rejected: {why}");
                    Ok(Outcome::rejected("id=none"))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::JoinFinish { name } => {
            let gpk = ks.load_gpk()?;
            let pending: PendingUser = ks.load(&ks.join_file(name, "pending"))?;
            let response: JoinResponse = ks.load(&ks.join_file(name, "response"))?;
            let (id, usk, cert) = scheme::join_user_finalize(&gpk, &pending, &response)?;
            ks.save(&ks.member_secret(id), &usk, "member-secret", Some(id))?;
            ks.save(&ks.member_cert(id), &cert, "certificate", Some(id))?;
            Ok(Outcome::ok(format!("id={id}")))
        }
        Command::Sign { member, msg, out } => {
            let gpk = ks.load_gpk()?;
            let usk: UserSecret = ks.load(&ks.member_secret(*member))?;
            let cert: Certificate = ks.load(&ks.member_cert(*member))?;
            let message = read_file(msg)?;
            let mut rng = ctx.rng("sign", &[&member.to_le_bytes(), &message]);
            let sigma = scheme::sign(&gpk, &usk, &cert, &message, &mut rng)?;
            let path = out.clone().unwrap_or_else(|| with_suffix(msg, ".sig"));
            ks.save(&path, &sigma, "signature", None)?;
            Ok(Outcome::ok(format!("signature={}", path.display())))
        }
        Command::Verify { msg, sig } => {
            let gpk = ks.load_gpk()?;
            let sigma = load_signature(&gpk, sig)?;
            let ok = scheme::verify(&gpk, &read_file(msg)?, &sigma);
            Ok(Outcome { line: format!("valid={ok}"), accepted: ok })
        }
        Command::Open { msg, sig } => {
            let gpk = ks.load_gpk()?;
            let osk = ks.load(&ks.osk())?;
            let sigma = load_signature(&gpk, sig)?;
            match scheme::open(&gpk, &osk, &read_file(msg)?, &sigma) {
                Some(id) => {
                    if let Ok(registry) = ks.load::<Registry>(&ks.registry()) {
                        if let AuditFinding::Unregistered(id) = scheme::audit_opened_id(&registry, id) {
                            eprintln!("warning: opened id {id} is not in the registry");
                        }
                    }
                    Ok(Outcome::ok(format!("id={id}")))
                }
                None => Ok(Outcome::rejected("id=none")),
            }
        }
        Command::Reveal { id } => {
            let gpk = ks.load_gpk()?;
            let osk = ks.load(&ks.osk())?;
            let registry: Registry = ks.load(&ks.registry())?;
            match scheme::reveal(&gpk, &osk, &registry, *id)? {
                Some(td) => {
                    let path = ks.trapdoor(*id);
                    ks.save(&path, &td, "tracing-trapdoor", Some(*id))?;
                    Ok(Outcome::ok(format!("trapdoor={}", path.display())))
                }
                None => Ok(Outcome::rejected("trapdoor=none")),
            }
        }
        Command::Trace { trapdoor, sig } => {
            let gpk = ks.load_gpk()?;
            let td: TracingTrapdoor = ks.load(trapdoor)?;
            let sigma = load_signature(&gpk, sig)?;
            if scheme::trace(&gpk, &td, &sigma) {
                Ok(Outcome::ok("trace=match"))
            } else {
                Ok(Outcome::rejected("trace=no match"))
            }
        }
        Command::Claim { member, msg, sig, out } => {
            let gpk = ks.load_gpk()?;
            let usk: UserSecret = ks.load(&ks.member_secret(*member))?;
            let sigma = load_signature(&gpk, sig)?;
            let message = read_file(msg)?;
            let mut rng = ctx.rng("claim", &[&member.to_le_bytes(), &message, &sigma.rho]);
            match scheme::claim(&gpk, &usk, &message, &sigma, &mut rng)? {
                Some(proof) => {
                    let path = out.clone().unwrap_or_else(|| with_suffix(sig, ".claim"));
                    ks.save(&path, &proof, "claim", Some(*member))?;
                    Ok(Outcome::ok(format!("claim={}", path.display())))
                }
                None => Ok(Outcome::rejected("claim=none")),
            }
        }
        Command::ClaimVerify { msg, sig, claim } => {
            let gpk = ks.load_gpk()?;
            let sigma = load_signature(&gpk, sig)?;
            let proof = ClaimProof::from_bytes_for(&keystore::read(claim)?, &gpk)?;
            let ok = scheme::claim_verify(&gpk, &read_file(msg)?, &sigma, &proof);
            Ok(Outcome { line: format!("claim={}", if ok { "valid" } else { "invalid" }), accepted: ok })
        }
        Command::Demo { lambda, group_size } => demo::run(ctx, *lambda, *group_size),
    }
}
