//! HTTP and WebSocket front end that renders foveated frames on demand.
//!
//! * `GET /` serves the viewer (an assets directory, or a built-in page).
//! * `GET /frame?x=&y=&e_corner=&strength=&fragment=&method=` returns one PNG;
//!   its stats travel in the `x-frame-stats` header.
//! * `GET /grid?…` returns the blur-grid dump for the same query.
//! * `/stream` is a WebSocket: JSON fixation messages in, binary frames out
//!   (see [`protocol`]). Overrides in a message persist for the connection.

pub mod protocol;
pub mod render;
pub mod server;

pub use protocol::{
    decode_frame, encode_frame, ControlMessage, ErrorReply, FrameStats, RenderMethod,
};
pub use render::{render_frame, render_job, Job, Session};
pub use server::{bind, router, serve, ServiceConfig};
