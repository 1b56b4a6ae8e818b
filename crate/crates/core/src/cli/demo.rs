//! Three members through the whole lifecycle, driven by the ordinary commands.

use super::{execute, CliError, Command, Context, Outcome};
use std::fs;
use std::path::PathBuf;

const MEMBERS: usize = 3;

struct Checks {
    passed: usize,
    failed: Vec<String>,
}

impl Checks {
    fn expect(&mut self, what: &str, outcome: &Outcome, accepted: bool, line: Option<&str>) {
        let ok = outcome.accepted == accepted && line.is_none_or(|l| outcome.line == l);
        eprintln!("{:4}  {what}: {}", if ok { "ok" } else { "FAIL" }, outcome.line);
        if ok {
            self.passed += 1;
        } else {
            self.failed.push(what.to_owned());
        }
    }
}

fn step(ctx: &Context, command: Command) -> Result<Outcome, CliError> {
    let out = execute(ctx, &command)?;
    if !out.accepted {
        return Err(CliError::Usage(format!("{command:?} was refused: {}", out.line)));
    }
    Ok(out)
}

fn parse_id(out: &Outcome) -> Result<u64, CliError> {
    out.line
        .strip_prefix("id=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::Usage(format!("unexpected output {}", out.line)))
}

pub fn run(ctx: &Context, lambda: usize, group_size: u64) -> Result<Outcome, CliError> {
    let ks = &ctx.ks;
    if ks.gpk().exists() {
        return Err(CliError::Usage(format!("{} already holds a group; use an empty keystore", ks.root().display())));
    }
    step(ctx, Command::Setup { lambda, group_size })?;
    step(ctx, Command::Keygen)?;

    let mut ids = Vec::with_capacity(MEMBERS);
    for i in 1..=MEMBERS {
        let name = format!("member-{i}");
        step(ctx, Command::JoinRequest { name: name.clone() })?;
        step(ctx, Command::JoinApprove { name: name.clone() })?;
        ids.push(parse_id(&step(ctx, Command::JoinFinish { name })?)?);
    }

    let dir = ks.root().join("demo");
    fs::create_dir_all(&dir).map_err(tracesig::Error::from)?;
    let mut checks = Checks { passed: 0, failed: Vec::new() };
    let mut signed: Vec<(u64, PathBuf, PathBuf)> = Vec::new();
    for &id in &ids {
        let msg = dir.join(format!("message-{id}.txt"));
        fs::write(&msg, format!("demo message signed by member {id}\n")).map_err(tracesig::Error::from)?;
        let sig = dir.join(format!("message-{id}.sig"));
        step(ctx, Command::Sign { member: id, msg: msg.clone(), out: Some(sig.clone()) })?;
        let out = execute(ctx, &Command::Verify { msg: msg.clone(), sig: sig.clone() })?;
        checks.expect(&format!("verify signature of {id}"), &out, true, None);
        let out = execute(ctx, &Command::Open { msg: msg.clone(), sig: sig.clone() })?;
        checks.expect(&format!("open signature of {id}"), &out, true, Some(&format!("id={id}")));
        signed.push((id, msg, sig));
    }

    for &id in &ids {
        let out = execute(ctx, &Command::Reveal { id })?;
        checks.expect(&format!("reveal {id}"), &out, true, None);
    }
    for (i, (id, _, sig)) in signed.iter().enumerate() {
        let out = execute(ctx, &Command::Trace { trapdoor: ks.trapdoor(*id), sig: sig.clone() })?;
        checks.expect(&format!("trace {id} with own trapdoor"), &out, true, Some("trace=match"));
        let other = ids[(i + 1) % ids.len()];
        let out = execute(ctx, &Command::Trace { trapdoor: ks.trapdoor(other), sig: sig.clone() })?;
        checks.expect(&format!("trace {id} with trapdoor of {other}"), &out, false, Some("trace=no match"));
    }

    let (id, msg, sig) = &signed[0];
    let claim = dir.join(format!("message-{id}.claim"));
    let out = execute(ctx, &Command::Claim { member: *id, msg: msg.clone(), sig: sig.clone(), out: Some(claim.clone()) })?;
    checks.expect(&format!("claim by {id}"), &out, true, None);
    let out = execute(ctx, &Command::ClaimVerify { msg: msg.clone(), sig: sig.clone(), claim: claim.clone() })?;
    checks.expect(&format!("verify claim by {id}"), &out, true, Some("claim=valid"));
    let (_, other_msg, other_sig) = &signed[1];
    let out = execute(ctx, &Command::ClaimVerify { msg: other_msg.clone(), sig: other_sig.clone(), claim })?;
    checks.expect("claim moved to another signature", &out, false, Some("claim=invalid"));
    let out = execute(ctx, &Command::Claim { member: ids[1], msg: msg.clone(), sig: sig.clone(), out: None })?;
    checks.expect(&format!("claim by non-signer {}", ids[1]), &out, false, Some("claim=none"));

    if checks.failed.is_empty() {
        Ok(Outcome::ok(format!("demo=ok members={MEMBERS} checks={}", checks.passed)))
    } else {
        Ok(Outcome::rejected(format!("demo=failed failed={}", checks.failed.join(","))))
    }
}
