"""
FastAPI application for diacritic-based language identification.

Run with ``uvicorn app.main:app`` or ``python app/main.py``.
"""

import sys
from pathlib import Path

from dotenv import load_dotenv

# Add project root to Python path for imports
# This allows the script to be run directly: python app/main.py
project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

# Load environment variables
load_dotenv()

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from app.api import routes
from app.api.routes import router as api_router

# Initialize FastAPI app
app = FastAPI(
    title="Diacritic Language Identification",
    description="Identifies the language of Latin-script text images from the diacritics they contain",
    version="1.0.0",
    docs_url="/docs",
    redoc_url="/redoc",
)

# Add CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],  # In production, specify allowed origins
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(api_router, prefix="/api", tags=["api"])


class HealthResponse(BaseModel):
    """Health check response model."""
    status: str
    message: str
    detector_model: bool
    langid_model: bool


@app.get("/", tags=["root"])
def root():
    """Root endpoint."""
    return {
        "message": "Diacritic language identification API is running!",
        "docs": "/docs",
        "health": "/health",
    }


@app.get("/health", response_model=HealthResponse, tags=["health"])
def health_check():
    """Health check endpoint."""
    status = routes.model_status()
    ready = all(status.values())
    return HealthResponse(
        status="ok",
        message="Service is healthy" if ready else "Service is running but a model file is missing",
        detector_model=status["detector"],
        langid_model=status["langid"],
    )


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(app, host="0.0.0.0", port=8000, reload=False)
