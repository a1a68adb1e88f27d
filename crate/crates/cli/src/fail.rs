//! Exit-code mapping, kept in one place so CI can assert on failures.

use transteg_core::engine::EngineError;
use transteg_core::harness::HarnessError;
use transteg_core::planner::PlanError;
use transteg_core::rtp::PcapError;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_IO: u8 = 4;

pub struct Failure {
    pub exit_code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            exit_code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Failure {
            exit_code: EXIT_DATA,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Failure {
            exit_code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let code = match &e {
            HarnessError::Infeasible { .. }
            | HarnessError::BadRatio(_)
            | HarnessError::VariableRateOvert => EXIT_USAGE,
            HarnessError::AudioLoad(_) | HarnessError::BadSampleRate(_) | HarnessError::Io(_) => {
                EXIT_IO
            }
            HarnessError::Pcap(PcapError::Io(_)) => EXIT_IO,
            HarnessError::Pcap(_) | HarnessError::Rtp(_) => EXIT_USAGE,
            HarnessError::Engine(_)
            | HarnessError::Checksum(_)
            | HarnessError::LengthMismatch { .. } => EXIT_DATA,
        };
        Failure {
            exit_code: code,
            message: e.to_string(),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = match &e {
            EngineError::Infeasible { .. } => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        Failure {
            exit_code: code,
            message: e.to_string(),
        }
    }
}

impl From<PlanError> for Failure {
    fn from(e: PlanError) -> Self {
        let code = match &e {
            PlanError::Io(_) => EXIT_IO,
            _ => EXIT_USAGE,
        };
        Failure {
            exit_code: code,
            message: e.to_string(),
        }
    }
}

impl From<PcapError> for Failure {
    fn from(e: PcapError) -> Self {
        let code = match &e {
            PcapError::Io(_) => EXIT_IO,
            _ => EXIT_USAGE,
        };
        Failure {
            exit_code: code,
            message: e.to_string(),
        }
    }
}
