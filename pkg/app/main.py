from fastapi import FastAPI
import logging

from app.routers import forecast

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

logger = logging.getLogger(__name__)

SERVICE_NAME = "Air Taxi Demand Forecaster"

app = FastAPI(
    title=SERVICE_NAME,
    description="Forecast urban air taxi trips, aircraft movements and fleet size for a database of cities "
                "under ticket price and vertiport density scenarios",
    version="1.0.0",
)

app.include_router(forecast.router)


@app.get("/health")
async def health_check():
    """Health check endpoint."""
    return {"status": "healthy", "service": SERVICE_NAME}


@app.get("/")
async def home():
    return {
        "service": SERVICE_NAME,
        "endpoints": [
            "POST /api/cities/validate",
            "POST /api/forecast/city",
            "POST /api/forecast/sweep",
            "POST /api/forecast/scenario",
        ],
        "docs": "/docs",
    }


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
