//! Wire format shared by `/stream` and `/frame`.
//!
//! Inbound control messages are JSON text frames:
//! `{"x":int,"y":int,"e_corner":num?,"strength":num?,"fragment":int?,"method":string?}`.
//! Outbound frames are binary: a 4-byte big-endian length `n`, `n` bytes of
//! JSON [`FrameStats`], then a PNG.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// How a frame is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RenderMethod {
    #[default]
    Blockwise,
    Pyramid,
    /// Per-pixel Gaussian reference.
    Oracle,
    /// Source image, no foveation.
    Off,
}

impl RenderMethod {
    pub fn name(self) -> &'static str {
        match self {
            RenderMethod::Blockwise => "blockwise",
            RenderMethod::Pyramid => "pyramid",
            RenderMethod::Oracle => "oracle",
            RenderMethod::Off => "off",
        }
    }
}

impl fmt::Display for RenderMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RenderMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "blockwise" => Ok(RenderMethod::Blockwise),
            "pyramid" => Ok(RenderMethod::Pyramid),
            "oracle" => Ok(RenderMethod::Oracle),
            "off" => Ok(RenderMethod::Off),
            other => Err(format!(
                "unknown method {other:?} (expected blockwise, pyramid, oracle or off)"
            )),
        }
    }
}

/// One fixation update from the client.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlMessage {
    pub x: i64,
    pub y: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_corner: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strength: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fragment: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
}

impl ControlMessage {
    pub fn at(x: i64, y: i64) -> Self {
        Self {
            x,
            y,
            e_corner: None,
            strength: None,
            fragment: None,
            method: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("malformed control message: {e}"))
    }
}

/// Metadata sent in front of every frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameStats {
    pub render_ms: f64,
    pub regions: usize,
    pub fragment: usize,
    pub method: RenderMethod,
    /// Fixation actually used, after clamping.
    pub x: usize,
    pub y: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Error reply for a rejected control message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReply {
    pub error: String,
}

pub fn encode_frame(stats: &FrameStats, png: &[u8]) -> Vec<u8> {
    let meta = serde_json::to_vec(stats).expect("stats serialize");
    let mut out = Vec::with_capacity(4 + meta.len() + png.len());
    out.extend_from_slice(&(meta.len() as u32).to_be_bytes());
    out.extend_from_slice(&meta);
    out.extend_from_slice(png);
    out
}

/// Splits a binary frame into its stats and PNG payload.
pub fn decode_frame(bytes: &[u8]) -> Result<(FrameStats, &[u8]), String> {
    if bytes.len() < 4 {
        return Err(format!(
            "frame of {} bytes has no length prefix",
            bytes.len()
        ));
    }
    let n = u32::from_be_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]) as usize;
    let rest = &bytes[4..];
    if rest.len() < n {
        return Err(format!(
            "stats length {n} exceeds frame payload {}",
            rest.len()
        ));
    }
    let stats = serde_json::from_slice(&rest[..n]).map_err(|e| format!("bad stats block: {e}"))?;
    Ok((stats, &rest[n..]))
}
