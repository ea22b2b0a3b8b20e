"""
This module defines small file helpers for the documents the package reads and writes.

`JsonFile` stores auctions, reports and configuration as JSON, `GenericFile` stores
plain text (the simple-auction sequence format), and `CsvFile` ingests bidder
samples laid out as one column per bidder.
"""

import csv
import json

from .errors import FileFormatError


class JsonFile:
    """
    A JSON document on disk.

    Attributes:
        filepath (str): Location of the document.
    """

    def __init__(self, filepath: str) -> None:
        self.filepath: str = filepath
        self.encoding: str = 'utf-8'
        self.indent: int = 2

    def readJson(self) -> dict:
        """
        Reads and decodes the document.

        Returns:
            dict: The decoded document.

        Raises:
            FileFormatError: If the file is missing or does not contain valid JSON.
        """
        try:
            with open(file=self.filepath, mode='r', encoding=self.encoding) as jsonFile:
                return json.load(jsonFile)
        except FileNotFoundError:
            raise FileFormatError(f"Error: File '{self.filepath}' does not exist.")
        except json.JSONDecodeError as e:
            raise FileFormatError(f"Error: File '{self.filepath}' contains malformed JSON (line {e.lineno}, column {e.colno}).")

    def writeJson(self, data: dict) -> bool:
        """
        Writes `data` with sorted keys so that identical inputs give identical bytes.

        Args:
            data (dict): A JSON-serializable document.

        Returns:
            bool: True once the file is written.
        """
        try:
            with open(file=self.filepath, mode='w', encoding=self.encoding) as jsonFile:
                json.dump(data, jsonFile, indent=self.indent, sort_keys=True)
                jsonFile.write('\n')

            return True
        except PermissionError:
            raise FileFormatError(f"Error: You do not have permissions to write to '{self.filepath}'.")


class GenericFile:
    """
    A plain text file on disk.

    Attributes:
        filepath (str): Location of the file.
    """

    def __init__(self, filepath: str) -> None:
        self.filepath: str = filepath
        self.encoding: str = 'utf-8'

    def readFile(self, lines: bool = False) -> str | list:
        try:
            with open(file=self.filepath, mode='r', encoding=self.encoding) as file:
                return file.read() if not lines else file.read().splitlines()
        except FileNotFoundError:
            raise FileFormatError(f"Error: File '{self.filepath}' does not exist.")

    def writeFile(self, data: str) -> bool:
        try:
            with open(file=self.filepath, mode='w', encoding=self.encoding) as file:
                file.write(data)

            return True
        except PermissionError:
            raise FileFormatError(f"Error: You do not have permissions to write to '{self.filepath}'.")


class CsvFile:
    """
    A sample table: header `bidder_1,...,bidder_n`, one row per sample index.

    Attributes:
        filepath (str): Location of the table.
    """

    def __init__(self, filepath: str) -> None:
        self.filepath: str = filepath
        self.encoding: str = 'utf-8'

    def readSamples(self) -> list[list[float]]:
        """
        Reads the table column by column.

        Returns:
            list[list[float]]: One list of sample values per bidder.

        Raises:
            FileFormatError: On a missing file, a bad header, a missing cell or a
                non-numeric cell; the message names the offending row and column.
        """
        try:
            with open(file=self.filepath, mode='r', encoding=self.encoding, newline='') as csvFile:
                rows = list(csv.reader(csvFile))
        except FileNotFoundError:
            raise FileFormatError(f"Error: File '{self.filepath}' does not exist.")

        if not rows:
            raise FileFormatError(f"Error: File '{self.filepath}' is empty.")

        header = [cell.strip() for cell in rows[0]]
        expected = [f'bidder_{i + 1}' for i in range(len(header))]

        if header != expected:
            raise FileFormatError(f"Error: Header must be {','.join(expected)}, got {','.join(header)}.")

        columns: list[list[float]] = [[] for _ in header]

        for rowNumber, row in enumerate(rows[1:], start=2):
            if not row:
                continue

            if len(row) != len(header):
                raise FileFormatError(f'Error: Row {rowNumber} has {len(row)} cells, expected {len(header)}.')

            for column, cell in enumerate(row):
                if cell.strip() == '':
                    raise FileFormatError(f'Error: Missing cell at row {rowNumber}, column {header[column]}.')
                try:
                    columns[column].append(float(cell))
                except ValueError:
                    raise FileFormatError(f"Error: Non-numeric cell '{cell}' at row {rowNumber}, column {header[column]}.")

        return columns

    def writeSamples(self, columns: list[list[float]]) -> bool:
        """
        Writes one column per bidder; all columns must have equal length.

        Args:
            columns (list[list[float]]): Sample values per bidder.

        Returns:
            bool: True once the file is written.
        """
        if len({len(column) for column in columns}) > 1:
            raise FileFormatError('Error: Sample columns have different lengths.')

        with open(file=self.filepath, mode='w', encoding=self.encoding, newline='') as csvFile:
            writer = csv.writer(csvFile)
            writer.writerow([f'bidder_{i + 1}' for i in range(len(columns))])
            for row in zip(*columns):
                writer.writerow([repr(float(value)) for value in row])

        return True
