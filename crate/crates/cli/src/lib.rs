//! Command-line front end and HTTP service for gdiagram sessions.

pub mod server;
