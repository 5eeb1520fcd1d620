"""Test package for Site2MD."""