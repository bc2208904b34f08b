//! Verdicts from how a driver run ended and how far it got.

use serde::{Deserialize, Serialize};

use super::exec::{Checkpoint, Termination};

pub const SIGABRT: i32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Survived,
    KillDiff,
    KillCrashMut,
    PreconditionViolation,
    TimeoutHang,
}

impl Verdict {
    pub fn is_kill(self) -> bool {
        matches!(self, Verdict::KillDiff | Verdict::KillCrashMut)
    }
}

/// Timeouts are hangs. A normal exit after `EQ` survives, an abort after
/// `DIFF` is a divergence, and any other abnormal end inside the mutated
/// call is a crash of the mutant. Everything else (the original crashed, or
/// the run died outside either call) discards the input.
pub fn classify(termination: &Termination, trace: &[Checkpoint]) -> Verdict {
    let last = trace.last().copied();
    match termination {
        Termination::Timeout => Verdict::TimeoutHang,
        Termination::Exit(0) if last == Some(Checkpoint::Eq) => Verdict::Survived,
        Termination::Signal(SIGABRT) if last == Some(Checkpoint::Diff) => Verdict::KillDiff,
        _ if last == Some(Checkpoint::CallMut) => Verdict::KillCrashMut,
        _ => Verdict::PreconditionViolation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Checkpoint::*;

    #[test]
    fn abort_after_diff() {
        let t = [CallOrig, RetOrig, CallMut, RetMut, Diff];
        assert_eq!(classify(&Termination::Signal(SIGABRT), &t), Verdict::KillDiff);
        assert_eq!(classify(&Termination::Exit(0), &t), Verdict::PreconditionViolation);
    }

    #[test]
    fn crash_positions() {
        assert_eq!(classify(&Termination::Signal(11), &[CallOrig]), Verdict::PreconditionViolation);
        assert_eq!(classify(&Termination::Signal(11), &[CallOrig, RetOrig, CallMut]), Verdict::KillCrashMut);
        assert_eq!(classify(&Termination::Signal(11), &[]), Verdict::PreconditionViolation);
        assert_eq!(classify(&Termination::Exit(3), &[CallOrig, RetOrig, CallMut]), Verdict::KillCrashMut);
    }

    #[test]
    fn survived_and_timeout() {
        assert_eq!(classify(&Termination::Exit(0), &[CallOrig, RetOrig, CallMut, RetMut, Eq]), Verdict::Survived);
        assert_eq!(classify(&Termination::Timeout, &[CallOrig, RetOrig, CallMut]), Verdict::TimeoutHang);
    }
}
