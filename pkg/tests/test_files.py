import pytest

from Auctioneer.utils.files import CsvFile, GenericFile, JsonFile
from Auctioneer.utils.errors import FileFormatError


class TestJsonFile:

    def test_write_is_stable(self, tmp_path):
        path = tmp_path / 'report.json'
        JsonFile(str(path)).writeJson({'b': 1, 'a': [0.5]})

        assert path.read_text(encoding='utf-8') == '{\n  "a": [\n    0.5\n  ],\n  "b": 1\n}\n'

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileFormatError, match='does not exist'):
            JsonFile(str(tmp_path / 'absent.json')).readJson()

    def test_malformed(self, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"eps": ', encoding='utf-8')

        with pytest.raises(FileFormatError, match='malformed JSON'):
            JsonFile(str(path)).readJson()


class TestGenericFile:

    def test_write_read(self, tmp_path):
        file = GenericFile(str(tmp_path / 'auction.txt'))
        file.writeFile('1 2.0 1.0\n0 2\n')

        assert file.readFile(lines=True) == ['1 2.0 1.0', '0 2']
        assert file.readFile() == '1 2.0 1.0\n0 2\n'


class TestCsvFile:

    def test_columns(self, tmp_path):
        file = CsvFile(str(tmp_path / 'samples.csv'))
        file.writeSamples([[0.5, 1.0], [0.25, 0.75]])

        assert file.readSamples() == [[0.5, 1.0], [0.25, 0.75]]

    @pytest.mark.parametrize('text, message', [
        ('', 'is empty'),
        ('bidder_2,bidder_1\n1,2\n', 'Header'),
        ('bidder_1,bidder_2\n1\n', 'Row 2 has 1 cells'),
        ('bidder_1,bidder_2\n1,\n', 'Missing cell at row 2, column bidder_2'),
        ('bidder_1\n0.5\nhigh\n', "Non-numeric cell 'high' at row 3"),
    ])
    def test_malformed(self, tmp_path, text, message):
        path = tmp_path / 'samples.csv'
        path.write_text(text, encoding='utf-8')

        with pytest.raises(FileFormatError, match=message):
            CsvFile(str(path)).readSamples()

    def test_unequal_columns(self, tmp_path):
        with pytest.raises(FileFormatError):
            CsvFile(str(tmp_path / 'samples.csv')).writeSamples([[0.5], [0.5, 1.0]])
