import logging
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

from cli.RunConfig import parse_config
from cli.Runner import execute, report_error
from errors import DivCurlError

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    try:
        config = parse_config(argv)
    except DivCurlError as e:
        report_error(e.to_dict())
        return e.exit_code

    logging.basicConfig(level=config.log_level, format=LOG_FORMAT, stream=sys.stderr)
    return execute(config)


if __name__ == "__main__":
    sys.exit(main())
