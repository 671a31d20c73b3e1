import json
import logging
import sqlite3
from contextlib import contextmanager
from datetime import datetime
from typing import Any, Dict, Iterator, List, Optional

from complexes.RefinementReport import RefinementReport
from divcurl.ConvergenceTable import ConvergenceTable
from .utils import NUMPY_ADAPTERS

logger = logging.getLogger(__name__)


class ResultsDatabase:
    """SQLite ledger of runs, convergence rows and refinement levels"""

    def __init__(self, db_path: str = "divcurl_runs.db"):
        """
        Initialize the database

        Args:
            db_path: Path to the SQLite database file
        """
        self.db_path = str(db_path)

        # numpy scalars are stored as plain INTEGER / REAL
        for numpy_type, adapter in NUMPY_ADAPTERS.items():
            sqlite3.register_adapter(numpy_type, adapter)

        self._create_tables()

    @contextmanager
    def _connect(self) -> Iterator[sqlite3.Connection]:
        """Connection that commits on success and is always closed"""
        conn = sqlite3.connect(self.db_path, detect_types=sqlite3.PARSE_DECLTYPES)
        try:
            with conn:
                yield conn
        finally:
            conn.close()

    def _create_tables(self):
        """Create the necessary database tables"""
        with self._connect() as conn:
            cursor = conn.cursor()

            cursor.execute(
                """
                CREATE TABLE IF NOT EXISTS runs (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    command TEXT NOT NULL,
                    config_json TEXT NOT NULL,
                    summary TEXT,
                    created_at TEXT DEFAULT CURRENT_TIMESTAMP
                )
            """
            )

            cursor.execute(
                """
                CREATE TABLE IF NOT EXISTS convergence_rows (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_id INTEGER NOT NULL,
                    N INTEGER NOT NULL,
                    k INTEGER NOT NULL,
                    grid_json TEXT NOT NULL,
                    value REAL NOT NULL,
                    reference REAL NOT NULL,
                    error REAL NOT NULL,
                    res_div REAL,
                    res_curl REAL,
                    weak_gap REAL,
                    local_error REAL,
                    FOREIGN KEY (run_id) REFERENCES runs (id)
                )
            """
            )

            cursor.execute(
                """
                CREATE TABLE IF NOT EXISTS refinement_levels (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_id INTEGER NOT NULL,
                    N INTEGER NOT NULL,
                    poincare_A0 REAL NOT NULL,
                    poincare_A1star REAL NOT NULL,
                    harmonic_dim INTEGER NOT NULL,
                    FOREIGN KEY (run_id) REFERENCES runs (id)
                )
            """
            )

            cursor.execute(
                "CREATE INDEX IF NOT EXISTS idx_runs_command ON runs(command)"
            )
            cursor.execute(
                "CREATE INDEX IF NOT EXISTS idx_convergence_rows_run_id ON convergence_rows(run_id)"
            )

            conn.commit()

    def store_run(self, command: str, config: Dict[str, Any], summary: str) -> int:
        """
        Store a finished run

        Args:
            command: CLI command that was executed
            config: JSON-serializable run configuration
            summary: One-line summary printed by the CLI

        Returns:
            Id of the new run, 0 if it could not be stored
        """
        config_json = json.dumps(config, sort_keys=True)
        with self._connect() as conn:
            cursor = conn.cursor()
            try:
                cursor.execute(
                    "SELECT id FROM runs WHERE command = ? AND config_json = ?",
                    (command, config_json),
                )
                if cursor.fetchone():
                    logger.warning(f"Storing a repeated {command} run")

                cursor.execute(
                    """
                    INSERT INTO runs (command, config_json, summary, created_at)
                    VALUES (?, ?, ?, ?)
                """,
                    (command, config_json, summary, datetime.now().isoformat()),
                )
                conn.commit()
                return int(cursor.lastrowid or 0)
            except sqlite3.Error as e:
                logger.error(f"Error storing {command} run: {e}")
                return 0

    def store_convergence_table(self, run_id: int, table: ConvergenceTable) -> int:
        """
        Store the rows of a convergence table

        Args:
            run_id: Run the table belongs to
            table: Table to store

        Returns:
            Number of rows stored
        """
        stored_count = 0
        grid_json = table.grid.to_json()
        with self._connect() as conn:
            cursor = conn.cursor()
            for row in table.rows:
                try:
                    cursor.execute(
                        """
                        INSERT INTO convergence_rows
                        (run_id, N, k, grid_json, value, reference, error,
                         res_div, res_curl, weak_gap, local_error)
                        VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
                    """,
                        (
                            run_id,
                            table.grid.N,
                            row.k,
                            grid_json,
                            row.value,
                            row.reference,
                            row.error,
                            row.res_div,
                            row.res_curl,
                            row.weak_gap,
                            row.local_error,
                        ),
                    )
                    stored_count += 1
                except sqlite3.Error as e:
                    logger.error(f"Error storing row k={row.k} of run {run_id}: {e}")
                    continue
            conn.commit()
        return stored_count

    def store_refinement_report(self, run_id: int, report: RefinementReport) -> int:
        stored_count = 0
        with self._connect() as conn:
            cursor = conn.cursor()
            for level in report.levels:
                try:
                    cursor.execute(
                        """
                        INSERT INTO refinement_levels
                        (run_id, N, poincare_A0, poincare_A1star, harmonic_dim)
                        VALUES (?, ?, ?, ?, ?)
                    """,
                        (
                            run_id,
                            level.N,
                            level.poincare_A0,
                            level.poincare_A1star,
                            level.harmonic_dim,
                        ),
                    )
                    stored_count += 1
                except sqlite3.Error as e:
                    logger.error(f"Error storing level N={level.N} of run {run_id}: {e}")
            conn.commit()
        return stored_count

    def get_runs(self, command: Optional[str] = None) -> List[Dict[str, Any]]:
        """
        Retrieve stored runs.

        Args:
            command: If set, only runs of this command.

        Returns:
            List of runs as dictionaries, oldest first.
        """
        with self._connect() as conn:
            cursor = conn.cursor()
            if command is None:
                cursor.execute(
                    "SELECT id, command, config_json, summary, created_at FROM runs ORDER BY id"
                )
            else:
                cursor.execute(
                    "SELECT id, command, config_json, summary, created_at FROM runs "
                    "WHERE command = ? ORDER BY id",
                    (command,),
                )
            rows = cursor.fetchall()
            return [
                {
                    "id": row[0],
                    "command": row[1],
                    "config": json.loads(row[2]),
                    "summary": row[3],
                    "created_at": row[4],
                }
                for row in rows
            ]

    def get_convergence_rows(self, run_id: int) -> List[Dict[str, Any]]:
        with self._connect() as conn:
            cursor = conn.cursor()
            cursor.execute(
                """
                SELECT N, k, grid_json, value, reference, error, res_div, res_curl,
                       weak_gap, local_error
                FROM convergence_rows WHERE run_id = ? ORDER BY N, k
            """,
                (run_id,),
            )
            columns = (
                "N",
                "k",
                "grid_json",
                "value",
                "reference",
                "error",
                "res_div",
                "res_curl",
                "weak_gap",
                "local_error",
            )
            return [dict(zip(columns, row)) for row in cursor.fetchall()]
