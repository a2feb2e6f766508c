"""Defacerテストスイート"""
