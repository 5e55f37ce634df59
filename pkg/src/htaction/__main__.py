from htaction.cli import main

main()
