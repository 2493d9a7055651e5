use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use pitplot_core::{Diagnostic, Error, ErrorClass};
use serde::Serialize;

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    diagnostics: Vec<Diagnostic>,
}

/// An error response: status plus a JSON body.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "validation", message.into())
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", message.into())
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message.into())
    }

    fn new(status: StatusCode, error: &'static str, message: String) -> Self {
        Self {
            status,
            body: ErrorBody {
                error,
                message,
                diagnostics: Vec::new(),
            },
        }
    }

    pub fn status(&self) -> StatusCode {
        self.status
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let mut api = match e.class() {
            ErrorClass::Validation => Self::bad_request(e.to_string()),
            ErrorClass::NotFound => Self::not_found(e.to_string()),
            ErrorClass::Domain => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "domain", e.to_string()),
            ErrorClass::Io => Self::internal(e.to_string()),
        };
        if let Error::Validation(v) = &e {
            api.body.diagnostics = v.diagnostics().to_vec();
        }
        api
    }
}

impl From<pitplot_core::ValidationErrors> for ApiError {
    fn from(e: pitplot_core::ValidationErrors) -> Self {
        Error::from(e).into()
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}
