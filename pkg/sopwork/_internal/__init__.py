# Every module in this subpackage cannot require any other
# resource from sopwork as a dependency.
