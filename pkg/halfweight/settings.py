import logging
import os

from dotenv import load_dotenv

load_dotenv()

# ============================
# ⚙️ Configuration from env
# ============================

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
LOG_FORMAT = "%(asctime)s %(levelname)s %(message)s"


def _int_env(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        logging.warning("%s=%r is not an integer, using %d", name, raw, default)
        return default
    if value < minimum:
        logging.warning("%s=%d is below %d, using %d", name, value, minimum, default)
        return default
    return value


# working precision of `build` when --prec is omitted
DEFAULT_PREC = _int_env("HALFWEIGHT_DEFAULT_PREC", 100_000)
# anything above DEFAULT_PREC needs --huge; nothing above MAX_PREC is accepted
MAX_PREC = _int_env("HALFWEIGHT_MAX_PREC", 1_000_000)
if MAX_PREC < DEFAULT_PREC:
    logging.warning(
        "HALFWEIGHT_MAX_PREC=%d is below the default precision %d", MAX_PREC, DEFAULT_PREC
    )
    MAX_PREC = DEFAULT_PREC

# a series is stored sparse when nonzero terms <= prec / SPARSE_RATIO
SPARSE_RATIO = _int_env("HALFWEIGHT_SPARSE_RATIO", 16)
# output chunk length and thread count of dense x dense convolution
CHUNK = _int_env("HALFWEIGHT_CHUNK", 4096)
WORKERS = _int_env("HALFWEIGHT_WORKERS", 1)


def configure_logging(level: str | None = None) -> None:
    logging.basicConfig(level=(level or LOG_LEVEL).upper(), format=LOG_FORMAT)
